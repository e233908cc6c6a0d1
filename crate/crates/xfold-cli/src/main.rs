//! Pipeline driver: construct slack-matrix factorizations, verify them,
//! build extensions, round to grid rationals, and report rank bounds.
//!
//! Every subcommand prints one JSON summary to stdout and exits 0 only when
//! all mathematical checks passed; check failures exit 1, operational errors
//! (I/O, parsing, bad arguments) exit 2 with `{"status":"fail","error":...}`.
//! Artifacts are written only under `--out`.  Output bytes are identical
//! across runs for identical configurations: fixed orderings, fixed rational
//! formatting, no timestamps.  `RAYON_NUM_THREADS` caps worker threads; no
//! other environment variable is read.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use xfold::io::{self, Bundle, NetworkMeta};
use xfold::{
    batcher_network, bounds_report, build_extension, build_permutahedron_factorization,
    build_polygon_factors, build_rounded_system, check_coefficient_bounds,
    check_projection_inclusion, make_grid_parabola_polygon, parabola_delta, permutahedron_hrep,
    permutahedron_vertices, polygon_to_hrep, slack_matrix, verify_factorization,
    verify_factorization_streaming, verify_recovery, Error, GridSelector, Mat,
    NonnegFactorization, Permutahedron, PointVec, PolygonV, Rat, Scalar, SlackMatrix,
    VerifySampling,
};

/// Slack matrices above this entry count are not materialized into bundles.
const S_EMIT_CAP: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "xfold",
    version,
    about = "Construct, verify, extend, round, and bound nonnegative slack-matrix factorizations",
    after_help = "RAYON_NUM_THREADS caps the worker threads used for parallel \
                  verification and LP batches."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regular n-gon: rank-2⌈log₂n⌉ factorization, verification, extension,
    /// projection certificate (float mode).
    Ngon(NgonArgs),
    /// Permutahedron: comparator-network factorization, exact rational
    /// verification, extension, projection certificate.
    Permutahedron(PermutahedronArgs),
    /// Integral polygon inscribed in the parabola over a grid, with its
    /// H-representation and the trivial rank-n factorization (exact).
    Gridgon(GridgonArgs),
    /// Round a factorization onto the Δ-grid and check lattice-point
    /// recovery exhaustively over the polygon's bounding box.
    Round(RoundArgs),
    /// Rank lower bounds (face count, linear rank) for a slack matrix.
    Bounds(BoundsArgs),
    /// Re-verify a factorization T·U against a slack matrix file.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    #[value(name = "rational")]
    Rational,
    #[value(name = "float64")]
    Float64,
}

#[derive(Args)]
struct NgonArgs {
    /// Vertex count (n >= 3).
    #[arg(long)]
    n: usize,
    /// Directory artifacts are written into (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verify at most this many slack entries; larger instances are sampled.
    #[arg(long, default_value_t = 20_000_000)]
    max_check_entries: u64,
    /// Seed for sampled verification beyond the entry cap.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative residual tolerance; may only loosen the built-in 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    /// Skip the per-facet LP projection certificate.
    #[arg(long)]
    skip_projection: bool,
}

#[derive(Args)]
struct PermutahedronArgs {
    /// Ground-set size (permutations of 1..=n); vertex enumeration caps at n = 8.
    #[arg(long)]
    n: usize,
    /// Directory artifacts are written into (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the per-facet LP projection certificate.
    #[arg(long)]
    skip_projection: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("selector").required(true).args(["seed", "subset"])))]
struct GridgonArgs {
    /// Vertex count (n >= 3); abscissas live in [1, 2n].
    #[arg(long)]
    n: usize,
    /// Seeded uniform choice of n distinct abscissas.
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit comma-separated abscissas, e.g. --subset 1,2,3.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<u64>>,
    /// Directory artifacts are written into (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundArgs {
    /// Polygon JSON (rational mode, integral vertices).
    #[arg(long)]
    polygon: PathBuf,
    /// Factorization bundle JSON; defaults to the trivial factorization of
    /// the polygon's slack matrix.
    #[arg(long)]
    factorization: Option<PathBuf>,
    /// Explicit Δ; defaults to the parabola-family value 144·n⁴ for an
    /// n-vertex polygon.
    #[arg(long)]
    delta: Option<u64>,
    /// Directory artifacts are written into (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Slack matrix file (.json or .csv).
    #[arg(long)]
    slack: PathBuf,
    /// Scalar mode of the file's entries.
    #[arg(long, value_enum, default_value = "rational")]
    mode: ModeArg,
    /// Rank of a constructed factorization, compared against the bounds.
    #[arg(long)]
    construction_rank: Option<u32>,
    /// Directory artifacts are written into (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Slack matrix file (.json or .csv).
    #[arg(long)]
    slack: PathBuf,
    /// Left factor T (.json or .csv).
    #[arg(long)]
    t: PathBuf,
    /// Right factor U (.json or .csv).
    #[arg(long)]
    u: PathBuf,
    /// Scalar mode of the files' entries.
    #[arg(long, value_enum, default_value = "rational")]
    mode: ModeArg,
    /// Relative residual tolerance; may only loosen the built-in 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    /// Directory artifacts are written into (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let failure = json!({
                "status": "fail",
                "error": "invalid-arguments",
                "detail": e.to_string(),
            });
            print!("{}", io::render_json(&failure));
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Ngon(args) => run_ngon(args),
        Command::Permutahedron(args) => run_permutahedron(args),
        Command::Gridgon(args) => run_gridgon(args),
        Command::Round(args) => run_round(args),
        Command::Bounds(args) => run_bounds(args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok((summary, pass)) => {
            print!("{}", io::render_json(&summary));
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let failure = json!({
                "status": "fail",
                "error": e.name(),
                "detail": e.to_string(),
            });
            print!("{}", io::render_json(&failure));
            ExitCode::from(2)
        }
    }
}

/// Summary JSON plus whether every mathematical check passed.
type CmdResult = Result<(Value, bool), Error>;

/// Tolerance overrides may only loosen float checks, never tighten or touch
/// exact ones.
fn effective_tol(user: Option<f64>, default: f64) -> Result<f64, Error> {
    match user {
        None => Ok(default),
        Some(t) if t.is_finite() && t >= default => Ok(t),
        Some(t) => Err(Error::InvalidInput(format!(
            "tolerance override {t:e} tightens the built-in {default:e}; overrides may only loosen"
        ))),
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn status_str(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "fail"
    }
}

fn run_ngon(args: &NgonArgs) -> CmdResult {
    let tol = effective_tol(args.tol, xfold::tol::VERIFY_REL)?;
    let (poly, h, f) = build_polygon_factors(args.n)?;
    let n = args.n as u64;
    let q = f.r() / 2;
    let entries = n * n;
    let sampling = if entries <= args.max_check_entries {
        VerifySampling::Full
    } else {
        VerifySampling::Random { seed: args.seed, count: args.max_check_entries }
    };
    let rep = verify_factorization_streaming(&h, poly.vertices(), &f, tol, sampling);
    let ext = build_extension(&h, &f)?;
    let proj =
        if args.skip_projection { None } else { Some(check_projection_inclusion(&ext, &h)?) };
    let pass = rep.pass && proj.as_ref().map_or(true, |p| p.pass);

    let mut artifacts = Vec::new();
    if let Some(dir) = &args.out {
        ensure_out_dir(dir)?;
        io::write_json(&dir.join("polygon.json"), &io::polygon_to_json(&poly))?;
        io::write_json(&dir.join("hrep.json"), &io::hrep_to_json(&h))?;
        let s = if entries <= S_EMIT_CAP {
            Some(slack_matrix(&h, poly.vertices())?.mat().clone())
        } else {
            None
        };
        let bundle = Bundle {
            n,
            q: q as u64,
            rank: f.r() as u64,
            t: f.t().clone(),
            u: f.u().clone(),
            s,
            residual: rep.max_residual.to_f64(),
            network: None,
        };
        io::write_bundle(&dir.join("bundle.json"), &bundle)?;
        io::write_json(&dir.join("verify_report.json"), &io::verify_report_to_json(&rep))?;
        io::write_json(&dir.join("extension.json"), &io::extension_to_json(&ext))?;
        artifacts.extend(["polygon.json", "hrep.json", "bundle.json", "verify_report.json", "extension.json"]);
        if let Some(p) = &proj {
            io::write_json(&dir.join("projection_report.json"), &io::projection_report_to_json(p))?;
            artifacts.push("projection_report.json");
        }
    }

    let mut summary = json!({
        "status": status_str(pass),
        "command": "ngon",
        "mode": "float64",
        "n": n,
        "q": q,
        "rank": f.r(),
        "verification": io::verify_report_to_json(&rep),
        "projection": proj.as_ref().map(io::projection_report_to_json).unwrap_or(Value::Null),
        "extension": { "d": ext.d(), "r": ext.r(), "m": ext.m() },
    });
    attach_failure(&mut summary, pass, &rep.pass, proj.as_ref().map(|p| p.pass));
    attach_artifacts(&mut summary, artifacts);
    Ok((summary, pass))
}

fn run_permutahedron(args: &PermutahedronArgs) -> CmdResult {
    let k = Permutahedron::new(args.n)?;
    let h = permutahedron_hrep(&k)?;
    let vertices: Vec<PointVec<Rat>> = permutahedron_vertices(&k)?.collect();
    let (s, f) = build_permutahedron_factorization(args.n)?;
    let net = batcher_network(args.n)?;
    let rep = verify_factorization(&s, &f, xfold::tol::VERIFY_REL);
    let ext = build_extension(&h, &f)?;
    let proj =
        if args.skip_projection { None } else { Some(check_projection_inclusion(&ext, &h)?) };
    let pass = rep.pass && proj.as_ref().map_or(true, |p| p.pass);

    let mut artifacts = Vec::new();
    if let Some(dir) = &args.out {
        ensure_out_dir(dir)?;
        io::write_json(&dir.join("hrep.json"), &io::hrep_to_json(&h))?;
        let points: Vec<Value> = vertices.iter().map(|p| io::vec_to_json(p.coords())).collect();
        io::write_json(
            &dir.join("vertices.json"),
            &json!({ "mode": "rational", "points": Value::Array(points) }),
        )?;
        let entries = (s.m() as u64) * (s.n() as u64);
        let bundle = Bundle {
            n: args.n as u64,
            q: net.size() as u64,
            rank: f.r() as u64,
            t: f.t().clone(),
            u: f.u().clone(),
            s: (entries <= S_EMIT_CAP).then(|| s.mat().clone()),
            residual: rep.max_residual.to_f64(),
            network: Some(NetworkMeta {
                size: net.size() as u64,
                comparators: net.comparators().to_vec(),
            }),
        };
        io::write_bundle(&dir.join("bundle.json"), &bundle)?;
        io::write_json(&dir.join("verify_report.json"), &io::verify_report_to_json(&rep))?;
        io::write_json(&dir.join("extension.json"), &io::extension_to_json(&ext))?;
        artifacts.extend(["hrep.json", "vertices.json", "bundle.json", "verify_report.json", "extension.json"]);
        if let Some(p) = &proj {
            io::write_json(&dir.join("projection_report.json"), &io::projection_report_to_json(p))?;
            artifacts.push("projection_report.json");
        }
    }

    let mut summary = json!({
        "status": status_str(pass),
        "command": "permutahedron",
        "mode": "rational",
        "n": args.n,
        "facets": s.m(),
        "vertices": s.n(),
        "network_size": net.size(),
        "rank": f.r(),
        "verification": io::verify_report_to_json(&rep),
        "projection": proj.as_ref().map(io::projection_report_to_json).unwrap_or(Value::Null),
        "extension": { "d": ext.d(), "r": ext.r(), "m": ext.m() },
    });
    attach_failure(&mut summary, pass, &rep.pass, proj.as_ref().map(|p| p.pass));
    attach_artifacts(&mut summary, artifacts);
    Ok((summary, pass))
}

fn run_gridgon(args: &GridgonArgs) -> CmdResult {
    let selector = match (&args.seed, &args.subset) {
        (Some(seed), None) => GridSelector::Seed(*seed),
        (None, Some(values)) => GridSelector::Subset(values.clone()),
        _ => unreachable!("clap enforces exactly one selector"),
    };
    let poly = make_grid_parabola_polygon(args.n, &selector)?;
    let h = polygon_to_hrep(&poly)?;
    let s = slack_matrix(&h, poly.vertices())?;
    let f = NonnegFactorization::trivial_from_slack(&s);
    let rep = verify_factorization(&s, &f, xfold::tol::VERIFY_REL);
    let pass = rep.pass;

    let mut artifacts = Vec::new();
    if let Some(dir) = &args.out {
        ensure_out_dir(dir)?;
        io::write_json(&dir.join("polygon.json"), &io::polygon_to_json(&poly))?;
        io::write_json(&dir.join("hrep.json"), &io::hrep_to_json(&h))?;
        let bundle = Bundle {
            n: args.n as u64,
            q: 0,
            rank: f.r() as u64,
            t: f.t().clone(),
            u: f.u().clone(),
            s: Some(s.mat().clone()),
            residual: rep.max_residual.to_f64(),
            network: None,
        };
        io::write_bundle(&dir.join("bundle.json"), &bundle)?;
        io::write_json(&dir.join("verify_report.json"), &io::verify_report_to_json(&rep))?;
        artifacts.extend(["polygon.json", "hrep.json", "bundle.json", "verify_report.json"]);
    }

    let vertices: Vec<Value> = poly.vertices().iter().map(|p| io::vec_to_json(p.coords())).collect();
    let mut summary = json!({
        "status": status_str(pass),
        "command": "gridgon",
        "mode": "rational",
        "n": args.n,
        "facets": h.m(),
        "rank": f.r(),
        "vertices": Value::Array(vertices),
        "verification": io::verify_report_to_json(&rep),
    });
    attach_failure(&mut summary, pass, &rep.pass, None);
    attach_artifacts(&mut summary, artifacts);
    Ok((summary, pass))
}

fn run_round(args: &RoundArgs) -> CmdResult {
    let ctx = args.polygon.display().to_string();
    let poly: PolygonV<Rat> = io::polygon_from_json(&io::read_json(&args.polygon)?, &ctx)?;
    let h = polygon_to_hrep(&poly)?;
    let f = match &args.factorization {
        Some(path) => {
            let bundle: Bundle<Rat> = io::read_bundle(path)?;
            NonnegFactorization::new(bundle.t, bundle.u)?
        }
        None => NonnegFactorization::trivial_from_slack(&slack_matrix(&h, poly.vertices())?),
    };
    let delta = match args.delta {
        Some(d) => {
            let d = i64::try_from(d)
                .map_err(|_| Error::TooLarge(format!("delta {d} exceeds i64")))?;
            Rat::from_int(d)
        }
        None => parabola_delta(poly.n())?,
    };
    let bounds_ok = check_coefficient_bounds(&h, poly.vertices(), &delta);
    let rs = build_rounded_system(&h, &f, &delta)?;
    let recovery = verify_recovery(&rs, &poly)?;
    let pass = bounds_ok && recovery.pass;

    let mut artifacts = Vec::new();
    if let Some(dir) = &args.out {
        ensure_out_dir(dir)?;
        io::write_json(&dir.join("rounded_system.json"), &io::rounded_system_to_json(&rs))?;
        io::write_json(&dir.join("recovery_report.json"), &io::recovery_report_to_json(&recovery))?;
        artifacts.extend(["rounded_system.json", "recovery_report.json"]);
    }

    let mut summary = json!({
        "status": status_str(pass),
        "command": "round",
        "mode": "rational",
        "delta": io::scalar_to_json(&delta),
        "epsilon": io::scalar_to_json(&rs.epsilon()),
        "grid_step": io::scalar_to_json(&rs.grid_step()),
        "rows": rs.a_bar().rows(),
        "d": rs.d(),
        "r": rs.r(),
        "coefficient_bounds_ok": bounds_ok,
        "recovery": io::recovery_report_to_json(&recovery),
    });
    if !pass {
        summary["error"] = json!(if bounds_ok { "recovery-failed" } else { "coefficient-bounds-exceeded" });
        let detail = if bounds_ok {
            format!("{} lattice points disagree", recovery.disagreements.len())
        } else {
            "coefficient magnitudes exceed delta".to_string()
        };
        summary["detail"] = json!(detail);
    }
    attach_artifacts(&mut summary, artifacts);
    Ok((summary, pass))
}

fn run_bounds(args: &BoundsArgs) -> CmdResult {
    match args.mode {
        ModeArg::Rational => bounds_generic::<Rat>(args),
        ModeArg::Float64 => bounds_generic::<f64>(args),
    }
}

fn bounds_generic<S: Scalar>(args: &BoundsArgs) -> CmdResult {
    let mat: Mat<S> = io::read_matrix_file(&args.slack)?;
    let s = SlackMatrix::from_mat(mat)?;
    // Faces of the underlying polytope: at least one per facet, one per
    // vertex, plus the empty face and the polytope itself.
    let face_count = s.m() as u64 + s.n() as u64 + 2;
    let report = bounds_report(face_count, &s, args.construction_rank)?;
    let pass = report.gap.map_or(true, |g| g >= 0);

    let mut artifacts = Vec::new();
    if let Some(dir) = &args.out {
        ensure_out_dir(dir)?;
        io::write_json(&dir.join("bounds_report.json"), &io::bounds_report_to_json(&report))?;
        artifacts.push("bounds_report.json");
    }

    let mut summary = json!({
        "status": status_str(pass),
        "command": "bounds",
        "mode": S::MODE.as_str(),
        "facets": s.m(),
        "vertices": s.n(),
        "face_count": face_count,
        "report": io::bounds_report_to_json(&report),
    });
    if !pass {
        summary["error"] = json!("rank-below-lower-bound");
        summary["detail"] = json!(format!(
            "construction rank {} is below a proven lower bound",
            args.construction_rank.unwrap_or(0)
        ));
    }
    attach_artifacts(&mut summary, artifacts);
    Ok((summary, pass))
}

fn run_verify(args: &VerifyArgs) -> CmdResult {
    match args.mode {
        ModeArg::Rational => verify_generic::<Rat>(args),
        ModeArg::Float64 => verify_generic::<f64>(args),
    }
}

fn verify_generic<S: Scalar>(args: &VerifyArgs) -> CmdResult {
    let tol = effective_tol(args.tol, xfold::tol::VERIFY_REL)?;
    let s = SlackMatrix::from_mat(io::read_matrix_file(&args.slack)?)?;
    let t: Mat<S> = io::read_matrix_file(&args.t)?;
    let u: Mat<S> = io::read_matrix_file(&args.u)?;
    if t.rows() != s.m() || u.cols() != s.n() || t.cols() != u.rows() {
        return Err(Error::InvalidSize(format!(
            "factor shapes {}x{} / {}x{} do not fit slack {}x{}",
            t.rows(),
            t.cols(),
            u.rows(),
            u.cols(),
            s.m(),
            s.n()
        )));
    }
    let f = NonnegFactorization::new(t, u)?;
    let rep = verify_factorization(&s, &f, tol);
    let pass = rep.pass;

    let mut artifacts = Vec::new();
    if let Some(dir) = &args.out {
        ensure_out_dir(dir)?;
        io::write_json(&dir.join("verify_report.json"), &io::verify_report_to_json(&rep))?;
        artifacts.push("verify_report.json");
    }

    let mut summary = json!({
        "status": status_str(pass),
        "command": "verify",
        "mode": S::MODE.as_str(),
        "rank": f.r(),
        "verification": io::verify_report_to_json(&rep),
    });
    attach_failure(&mut summary, pass, &rep.pass, None);
    attach_artifacts(&mut summary, artifacts);
    Ok((summary, pass))
}

/// On check failure, name the first failing stage so scripts need not dig
/// through the reports.
fn attach_failure(summary: &mut Value, pass: bool, verify_pass: &bool, proj_pass: Option<bool>) {
    if pass {
        return;
    }
    let (error, detail) = if !verify_pass {
        ("verification-failed", "residual or nonnegativity check failed")
    } else if proj_pass == Some(false) {
        ("projection-failed", "a facet LP exceeded its right-hand side or was unbounded")
    } else {
        ("check-failed", "a mathematical check failed")
    };
    summary["error"] = json!(error);
    summary["detail"] = json!(detail);
}

fn attach_artifacts(summary: &mut Value, artifacts: Vec<&'static str>) {
    if !artifacts.is_empty() {
        summary["artifacts"] = json!(artifacts);
    }
}
