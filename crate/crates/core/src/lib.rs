//! Combinatorial kernel for triangulations of closed surfaces.
//!
//! Maps are stored as flag systems ([`TriangulationMap`]) so that loops and
//! multiple edges are representable. On top of that sit the elementary moves
//! (flip, contraction, face subdivision, barycentric subdivision), explicit
//! flip gadgets, an isomorphism-reduced flip-graph search and a pipeline that
//! assembles verifiable regular-flip certificates between triangulations.

pub mod canon;
pub mod error;
pub mod gadgets;
pub mod gluing;
pub mod io;
pub mod map;
pub mod moves;
pub mod pipeline;
pub mod search;
pub mod seeds;

pub use canon::{canonical_form, canonical_key, Canonical, CanonicalKey};
pub use error::{Error, Result};
pub use map::{EdgeHandle, FaceHandle, SurfaceClass, TriangulationMap, VertexHandle};
pub use moves::{Move, MoveKind, MoveScript, ScriptBuilder};
