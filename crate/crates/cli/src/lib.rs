//! The `polylab` command line.
//!
//! Every subcommand prints plain `CHECK <name> PASS|FAIL <details>` lines.
//! Exit status: 0 when every check passes, 1 when a mathematical check
//! fails (or a search is cut short), 2 on usage, input or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use polylab_core::classify::{self, Classification, Theorem};
use polylab_core::construct;
use polylab_core::free;
use polylab_core::hyperplane::{self, HyperplaneKind};
use polylab_core::io::{self as pio, geometry_hash};
use polylab_core::report::Report;
use polylab_core::search::{enumerate_epimorphisms, SearchOptions};
use polylab_core::{classify_polygon, par, Error, IncidenceGeometry};

#[derive(Parser, Debug)]
#[command(name = "polylab", version, about = "Finite generalized polygons and their epimorphisms")]
pub struct Cli {
    /// Worker threads (default: all available). Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a geometry and write it as an `ig 1` file.
    Construct {
        name: Family,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        o: Option<PathBuf>,
    },
    /// Decide whether a geometry is a weak generalized polygon.
    Validate { file: PathBuf },
    /// Epimorphism search and classification.
    Epi {
        #[command(subcommand)]
        command: EpiCommand,
    },
    /// Check a classification theorem exhaustively on a source polygon.
    Theorem { which: TheoremName, src: PathBuf },
    /// Check the thin polygon theorem between thin m-gons of orders (s,1), (s',1).
    ThinTheorem {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        sp: usize,
    },
    /// Free completion over a grid.
    Free {
        #[command(subcommand)]
        command: FreeCommand,
    },
    /// Geometric hyperplanes of a thick generalized quadrangle.
    Hyperplane {
        #[command(subcommand)]
        command: HyperplaneCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum EpiCommand {
    /// Enumerate every epimorphism SRC -> TGT.
    Search {
        src: PathBuf,
        tgt: PathBuf,
        /// Fail once more than K maps exist.
        #[arg(long)]
        limit: Option<usize>,
        /// One map per orbit of target automorphisms.
        #[arg(long)]
        up_to_target_auto: bool,
        /// Directory for the `igmap 1` files.
        #[arg(short, long)]
        o: Option<PathBuf>,
    },
    /// Classify an epimorphism onto an ordinary polygon.
    Classify { src: PathBuf, mapfile: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum FreeCommand {
    /// Run N steps from the seed over TARGET.
    Run {
        target: PathBuf,
        #[arg(long)]
        stages: usize,
        /// Directory for journal.txt, stage.ig and stage.igmap.
        #[arg(short, long)]
        o: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum HyperplaneCommand {
    /// Classify one point set, given as comma-separated indices.
    Classify {
        geom: PathBuf,
        #[arg(long, value_delimiter = ',')]
        points: Vec<usize>,
    },
    /// Enumerate every hyperplane.
    Enum { geom: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Family {
    /// PG(2,q), --q
    ProjectivePlane,
    /// Q(4,q), --q
    Q4,
    /// W(q), --q
    W,
    /// T2 of the conic in PG(2,q), q even, --q
    T2,
    /// Split Cayley hexagon H(q), --q
    Hexagon,
    /// Ordinary m-gon, --m
    Ordinary,
    /// Digon with r points and c lines, --r --c
    Digon,
    /// r-by-c grid, --r --c
    Grid,
    /// Dual of the r-by-c grid, --r --c
    DualGrid,
    /// Thin hexagon of order (q,1) from PG(2,q) (the triangle when q = 1), --q
    ThinHexagon,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum TheoremName {
    Gt,
    Jatgq,
    Jatgh,
}

impl TheoremName {
    fn theorem(self) -> Theorem {
        match self {
            TheoremName::Gt => Theorem::GT,
            TheoremName::Jatgq => Theorem::JATGQ,
            TheoremName::Jatgh => Theorem::JATGH,
        }
    }
}

/// A failure that maps to an exit code.
enum Failure {
    /// Mathematical check failed or search cut short: exit 1.
    Finding(String),
    /// Bad invocation or input: exit 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Truncated { .. } | Error::Internal(_) => Failure::Finding(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

fn read_geometry(path: &Path) -> Result<IncidenceGeometry, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    pio::parse_geometry(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn need<T>(value: Option<T>, flag: &str, name: Family) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("construct {name:?} needs --{flag}")))
}

fn build(name: Family, q: Option<u32>, m: Option<usize>, r: Option<usize>, c: Option<usize>) -> Result<IncidenceGeometry, Failure> {
    let g = match name {
        Family::ProjectivePlane => construct::projective_plane(need(q, "q", name)?)?,
        Family::Q4 => construct::q4(need(q, "q", name)?)?,
        Family::W => construct::symplectic_quadrangle(need(q, "q", name)?)?,
        Family::T2 => {
            let q = need(q, "q", name)?;
            if q < 2 || !q.is_power_of_two() {
                return Err(Failure::Usage(format!("T2 of a conic needs q a power of 2, got {q}")));
            }
            let (plane, oval) = construct::segre_oval(1, q.trailing_zeros())?;
            construct::t2_of_oval(&plane, &oval)?
        }
        Family::Hexagon => construct::split_cayley_hexagon(need(q, "q", name)?)?,
        Family::Ordinary => construct::ordinary_polygon(need(m, "m", name)?)?,
        Family::Digon => construct::digon(need(r, "r", name)?, need(c, "c", name)?)?,
        Family::Grid => construct::grid(need(r, "r", name)?, need(c, "c", name)?)?,
        Family::DualGrid => construct::dual_grid(need(r, "r", name)?, need(c, "c", name)?)?,
        Family::ThinHexagon => classify::thin_polygon(6, need(q, "q", name)? as usize)?,
    };
    Ok(g)
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn search_options(limit: Option<usize>, up_to: bool, jobs: Option<usize>) -> SearchOptions {
    SearchOptions { limit, up_to_target_automorphism: up_to, jobs, ..SearchOptions::default() }
}

/// The target named by a morphism file: a path (relative to the file) or
/// the standard ordinary polygon with a matching digest.
fn resolve_target(reference: &str, mapfile: &Path, m: usize) -> Result<IncidenceGeometry, Failure> {
    if !reference.starts_with("sha256:") {
        let base = mapfile.parent().unwrap_or(Path::new("."));
        return read_geometry(&base.join(reference));
    }
    let standard = classify::standard_target(m)?;
    if geometry_hash(&standard) == reference {
        Ok(standard)
    } else {
        Err(Failure::Usage(format!("target {reference} is not the standard ordinary {m}-gon; name it by path")))
    }
}

fn execute(cli: Cli, out: &mut Vec<u8>) -> Outcome {
    let mut r = Report::new();
    match cli.command {
        Command::Construct { name, q, m, r: rows, c, o } => {
            let g = build(name, q, m, rows, c)?;
            let bytes = pio::write_geometry(&g);
            match o {
                Some(path) => {
                    write_out(&path, &bytes)?;
                    r.check(
                        "construct",
                        true,
                        format!("{} points, {} lines, {}", g.num_points(), g.num_lines(), geometry_hash(&g)),
                    );
                }
                None => out.write_all(&bytes)?,
            }
        }
        Command::Validate { file } => {
            let g = read_geometry(&file)?;
            match classify_polygon(&g) {
                Ok(class) => r.check("validate", true, class.to_string()),
                Err(Error::NotPolygon(w)) => r.check("validate", false, format!("not a weak generalized polygon: {w}")),
                Err(e) => return Err(e.into()),
            };
        }
        Command::Epi { command: EpiCommand::Search { src, tgt, limit, up_to_target_auto, o } } => {
            let s = Arc::new(read_geometry(&src)?);
            let t = Arc::new(read_geometry(&tgt)?);
            let opts = search_options(limit, up_to_target_auto, cli.jobs);
            let found = enumerate_epimorphisms(&s, &t, &opts)?;
            r.check("epi.search", true, format!("{} epimorphism(s), {} node(s)", found.count, found.nodes));
            if let Some(dir) = o {
                fs::create_dir_all(&dir)?;
                for (i, phi) in found.maps.iter().enumerate() {
                    write_out(&dir.join(format!("map_{i:06}.igmap")), &pio::write_morphism(phi))?;
                }
                r.check("epi.written", true, format!("{} file(s) in {}", found.maps.len(), dir.display()));
            }
        }
        Command::Epi { command: EpiCommand::Classify { src, mapfile } } => {
            let s = Arc::new(read_geometry(&src)?);
            let bytes = fs::read(&mapfile)?;
            let file = pio::parse_morphism(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", mapfile.display())))?;
            let m = classify_polygon(&s)?.gonality as usize;
            let t = Arc::new(resolve_target(&file.target, &mapfile, m)?);
            let phi = file.into_morphism(s, t)?;
            match classify::classify_epimorphism(&phi)? {
                Classification::Canonical(d) => r.check("epi.classify", true, d.to_string()),
                Classification::Unclassified(why) => r.check("epi.classify", false, format!("unclassified: {why}")),
            };
        }
        Command::Theorem { which, src } => {
            let s = Arc::new(read_geometry(&src)?);
            let class = classify_polygon(&s)?;
            let want = which.theorem();
            if class.gonality as usize != want.gonality() {
                return Err(Failure::Usage(format!("{want} needs a {}-gon, got {class}", want.gonality())));
            }
            r.extend(classify::verify_classification_theorem(&s, &search_options(None, false, cli.jobs))?);
        }
        Command::ThinTheorem { m, s, sp } => {
            r.extend(classify::thin_polygon_theorem_check(m, s, sp, &search_options(None, false, cli.jobs))?);
        }
        Command::Free { command: FreeCommand::Run { target, stages, o } } => {
            let t = Arc::new(read_geometry(&target)?);
            let state = free::run_free(free::seed_from_target(t)?, stages)?;
            r.extend(free::check_free_invariants(&state));
            let journal = state.journal_text();
            if let Some(dir) = o {
                fs::create_dir_all(&dir)?;
                write_out(&dir.join("journal.txt"), journal.as_bytes())?;
                write_out(&dir.join("stage.ig"), &pio::write_geometry(&state.geometry()?))?;
                write_out(&dir.join("stage.igmap"), &pio::write_morphism(&state.morphism()?))?;
            }
            let digest = hex_digest(journal.as_bytes());
            r.check("free.journal", true, format!("{} step(s), sha256:{digest}", state.journal.len()));
        }
        Command::Hyperplane { command: HyperplaneCommand::Classify { geom, points } } => {
            let g = read_geometry(&geom)?;
            let v = hyperplane::classify_hyperplane(&g, &points)?;
            r.check("hyperplane.classify", v.kind != HyperplaneKind::NotHyperplane, v.to_string());
        }
        Command::Hyperplane { command: HyperplaneCommand::Enum { geom } } => {
            let g = read_geometry(&geom)?;
            let all = hyperplane::enumerate_hyperplanes(&g)?;
            let count = |k| all.iter().filter(|(_, v)| v.kind == k).count();
            r.check(
                "hyperplane.enum",
                true,
                format!(
                    "{} hyperplane(s): A {} B {} C {}",
                    all.len(),
                    count(HyperplaneKind::A),
                    count(HyperplaneKind::B),
                    count(HyperplaneKind::C)
                ),
            );
            r.check("hyperplane.perps", count(HyperplaneKind::B) == g.num_points(), format!("{} kind B, {} points", count(HyperplaneKind::B), g.num_points()));
        }
    }
    Ok(r)
}

fn hex_digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

/// Runs one command line, writing the report to `out`; returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return e.exit_code();
        }
    };
    let jobs = cli.jobs;
    // commands that emit raw bytes write them here, before the report
    let mut raw = Vec::new();
    let outcome = par::with_jobs(jobs, || execute(cli, &mut raw));
    let _ = out.write_all(&raw);
    match outcome {
        Ok(report) => {
            let _ = write!(out, "{report}");
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Err(Failure::Finding(msg)) => {
            let _ = writeln!(out, "CHECK run FAIL {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(out, "error: {msg}");
            2
        }
    }
}
