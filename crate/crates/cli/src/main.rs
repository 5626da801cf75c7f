use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flipkit::io::{load_map, map_to_json};
use flipkit::moves::{apply_move, reduce_to_irreducible};
use flipkit::pipeline::{certify_equivalence, thresholds, verify_certificate, EquivalenceCertificate, Strategies};
use flipkit::search::{enumerate, explore, find_path, FlipMode, SearchBudget};
use flipkit::{Error, Move, SurfaceClass, TriangulationMap};
use serde_json::json;

#[derive(Parser)]
#[command(name = "flipkit", version, about = "Flips, contractions and certificates for surface triangulations")]
struct Cli {
    /// Worker threads for searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Regular,
    All,
}

impl From<Mode> for FlipMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Regular => FlipMode::RegularFlips,
            Mode::All => FlipMode::AllFlips,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Flip,
    Contract,
    Subdivide,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Direct,
    Theorem,
    Both,
}

#[derive(clap::Args)]
struct Budget {
    #[arg(long, default_value_t = 1_000_000)]
    max_nodes: usize,
    #[arg(long)]
    max_depth: Option<usize>,
}

impl From<&Budget> for SearchBudget {
    fn from(b: &Budget) -> Self {
        SearchBudget { max_nodes: b.max_nodes, max_depth: b.max_depth }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print counts, Euler characteristic, orientability and regularity.
    Validate { path: PathBuf },
    /// Apply one move addressed by canonical rank.
    Move {
        path: PathBuf,
        kind: Kind,
        target: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_singular: bool,
    },
    /// Shortest flip script between two maps.
    Connect {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "regular")]
        mode: Mode,
        #[command(flatten)]
        budget: Budget,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Regular-flip equivalence certificate between two regular maps.
    Certify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        strategy: Strategy,
        #[command(flatten)]
        budget: Budget,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Replay a certificate.
    Verify { path: PathBuf },
    /// All triangulations of a surface with `v` vertices.
    Enumerate {
        /// sphere, torus, projective-plane, klein-bottle, genus-G or chi:X[:n].
        surface: String,
        v: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Greedy contraction to an irreducible triangulation.
    Reduce {
        path: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Vertex thresholds for a surface.
    Thresholds { surface: String },
    /// Explore the flip graph from a map and export it.
    ExportDot {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "regular")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[command(flatten)]
        budget: Budget,
    },
}

enum Failure {
    Io(String),
    Domain(Error),
    Rejected,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Domain(Error::Format(_)) => 1,
            Failure::Domain(Error::Exhausted) => 3,
            Failure::Domain(_) | Failure::Rejected => 2,
        }
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_map(path: &Path) -> Res<TriangulationMap> {
    Ok(load_map(&read(path)?)?)
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_surface(s: &str) -> Res<SurfaceClass> {
    let bad = || Failure::Io(format!("unknown surface {s}"));
    let class = match s {
        "sphere" => SurfaceClass::SPHERE,
        "torus" => SurfaceClass::TORUS,
        "projective-plane" => SurfaceClass::PROJECTIVE_PLANE,
        "klein-bottle" => SurfaceClass::KLEIN_BOTTLE,
        _ => {
            if let Some(g) = s.strip_prefix("genus-") {
                SurfaceClass::orientable_genus(g.parse().map_err(|_| bad())?)
            } else if let Some(rest) = s.strip_prefix("chi:") {
                let (chi, orientable) = match rest.strip_suffix(":n") {
                    Some(c) => (c, false),
                    None => (rest, true),
                };
                SurfaceClass { euler_characteristic: chi.parse().map_err(|_| bad())?, orientable }
            } else {
                return Err(bad());
            }
        }
    };
    if class.is_valid() {
        Ok(class)
    } else {
        Err(bad())
    }
}

fn describe(m: &TriangulationMap) -> String {
    let (v, e, f) = m.counts();
    let class = m.surface_class();
    format!(
        "v={v} e={e} f={f} chi={} {} {}",
        class.euler_characteristic,
        if class.orientable { "orientable" } else { "non-orientable" },
        if m.is_regular() { "regular" } else { "singular" }
    )
}

fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Validate { path } => {
            let m = read_map(&path)?;
            println!("{}", describe(&m));
        }
        Command::Move { path, kind, target, out, allow_singular } => {
            let m = read_map(&path)?;
            let mv = match kind {
                Kind::Flip => Move::flip(target),
                Kind::Contract => Move::contract(target),
                Kind::Subdivide => Move::subdivide(target),
            };
            let next = apply_move(&m, mv)?;
            if !allow_singular && !next.is_regular() {
                return Err(Error::NotRegular.into());
            }
            emit(out.as_deref(), &map_to_json(&next))?;
        }
        Command::Connect { a, b, mode, budget, out } => {
            let (a, b) = (read_map(&a)?, read_map(&b)?);
            let script = find_path(&a, &b, mode.into(), (&budget).into())?;
            emit(out.as_deref(), &script.to_json())?;
        }
        Command::Certify { a, b, strategy, budget, out } => {
            let (a, b) = (read_map(&a)?, read_map(&b)?);
            let strategies = match strategy {
                Strategy::Direct => Strategies { direct: true, theorem: false },
                Strategy::Theorem => Strategies { direct: false, theorem: true },
                Strategy::Both => Strategies::default(),
            };
            let cert = certify_equivalence(&a, &b, (&budget).into(), strategies)?;
            emit(out.as_deref(), &cert.to_json())?;
        }
        Command::Verify { path } => {
            let cert = EquivalenceCertificate::from_json(&read(&path)?)?;
            let verdict = verify_certificate(&cert);
            if verdict.accepted {
                println!("accepted moves={}", cert.script.len());
            } else {
                println!("rejected: {}", verdict.reason.unwrap_or_default());
                return Err(Failure::Rejected);
            }
        }
        Command::Enumerate { surface, v, budget } => {
            let class = parse_surface(&surface)?;
            let en = enumerate(class, v, (&budget).into())?;
            let doc = json!({
                "surface": class.name(),
                "v": v,
                "total": en.keys.len(),
                "regular": en.regular_keys().len(),
                "maps": en.keys.iter().zip(&en.regular)
                    .map(|(k, r)| json!({"key": k.to_hex(), "regular": r}))
                    .collect::<Vec<_>>(),
            });
            println!("{doc}");
        }
        Command::Reduce { path, out } => {
            let m = read_map(&path)?;
            let (s, script) = reduce_to_irreducible(&m)?;
            eprintln!("{} contractions: {}", script.len(), describe(&s));
            if let Some(p) = out {
                emit(Some(&p), &map_to_json(&s))?;
            }
            println!("{}", script.to_json());
        }
        Command::Thresholds { surface } => {
            let t = thresholds(parse_surface(&surface)?);
            println!("{}", serde_json::to_string(&t).expect("thresholds serialize"));
        }
        Command::ExportDot { path, mode, format, budget } => {
            let m = read_map(&path)?;
            let store = explore(&[m], mode.into(), (&budget).into())?;
            match format {
                Format::Json => println!("{}", store.to_json()),
                Format::Dot => print!("{}", store.to_dot()),
            }
            if !store.is_complete() {
                eprintln!("warning: exploration stopped at the budget; graph is partial");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 1); 2 is reserved for domain failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Domain(e) => eprintln!("error: {e}"),
                Failure::Rejected => {}
            }
            ExitCode::from(f.code())
        }
    }
}
