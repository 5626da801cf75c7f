use thiserror::Error;

/// Every failure the kernel can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("flag arrays have inconsistent lengths")]
    LengthMismatch,
    #[error("flag count {0} is not a positive multiple of 6")]
    BadFlagCount(usize),
    #[error("s{inv}[{flag}] points outside the flag range")]
    OutOfRange { inv: usize, flag: usize },
    #[error("s{inv} is not an involution at flag {flag}")]
    NotInvolution { inv: usize, flag: usize },
    #[error("s{inv} fixes flag {flag}")]
    FixedPoint { inv: usize, flag: usize },
    #[error("edge orbit through flag {0} does not have exactly 4 flags")]
    EdgeOrbitNot4(usize),
    #[error("face orbit through flag {0} does not have exactly 6 flags")]
    FaceOrbitNot6(usize),
    #[error("flag set is not connected")]
    Disconnected,
    #[error("vertex pair ({0}, {1}) occurs in {2} face sides instead of 2")]
    NonPseudomanifold(u64, u64, usize),
    #[error("face {0} repeats a vertex")]
    RepeatedVertexInFace(usize),
    #[error("vertex {0} has a link that is not a single cycle")]
    PinchedVertex(u64),
    #[error("input does not describe a regular triangulation")]
    NotRegular,
    #[error("handle does not name an orbit of this map")]
    InvalidHandle,
    #[error("edge has the same face on both sides")]
    FlipBlocked,
    #[error("edge cannot be contracted")]
    ContractBlocked,
    #[error("move target {target} out of range ({available} available)")]
    AddressOutOfRange { target: usize, available: usize },
    #[error("start map does not match the declared start key")]
    StartKeyMismatch,
    #[error("final map does not match the declared end key")]
    EndKeyMismatch,
    #[error("move {0} is not a regular flip in an all-regular script")]
    NonRegularFlipInRegularScript(usize),
    #[error("gadget failed: {0}")]
    GadgetFailed(String),
    #[error("no local flip sequence realizes the lift")]
    LiftNotFound,
    #[error("incompatible inputs: {0}")]
    IncompatibleInputs(String),
    #[error("search budget exhausted")]
    Exhausted,
    #[error("the explored component does not contain the target")]
    NotConnected,
    /// The whole regular component (hex keys) was explored without a hit.
    #[error("regular component of {} maps exhausted without reaching the target", .0.len())]
    ProvablyNotConnected(Vec<String>),
    #[error("no standard seed for {0}")]
    NoSeedAvailable(String),
    #[error("malformed canonical key")]
    InvalidKey,
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
