//! Command-line front end.
//!
//! Exit status 0 on success, 1 when a computation fails (a JSON diagnostic
//! is written to stderr), 2 when the invocation itself is invalid. Output
//! files are written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::boundary::{
    boundary_general, boundary_sweep_2d, sample_directions, BoundaryPoint, ObservableSet,
    Strategy, DEFAULT_MAX_DEPTH,
};
use crate::classify::{classify_k2_qutrit, classify_k3_qutrit};
use crate::error::{JnrError, Result};
use crate::hermitian::{HermitianOperator, DEFAULT_GAP_TOL};
use crate::phase::{detect_ground_crossings, energy_bounds, known_energy, spectrum_sweep};
use crate::separable::{separable_boundary, SeesawParams};
use crate::spin::{build_model, Model};
use crate::thermal::{thermal_range_sweep, Beta};
use crate::uncertainty::{uncertainty_bracket, uncertainty_lifted, VarianceKind};

#[derive(Debug, Parser)]
#[command(name = "jnr", version, about = "Joint numerical ranges of Hermitian operators")]
pub struct Cli {
    /// Relative eigenvalue gap below which levels count as degenerate.
    #[arg(long, global = true, default_value_t = DEFAULT_GAP_TOL)]
    pub gap_tol: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary points from support directions (CSV).
    Boundary(BoundaryArgs),
    /// Flat parts and class of a qutrit range (JSON).
    Classify(OpsArgs),
    /// Thermal range points (CSV).
    Thermal(ThermalArgs),
    /// Seesaw points of the separable range (CSV).
    Separable(SeparableArgs),
    /// Writes the terms of a model Hamiltonian as operator files.
    Hamiltonian(HamiltonianArgs),
    /// Spectrum of cos(t) H0 + sin(t) H1 over a uniform angle grid (CSV).
    Spectrum(SpectrumArgs),
    /// Concavity bounds on the ground energy of H0 + a H1 (JSON).
    EnergyBounds(EnergyBoundsArgs),
    /// Bracket on the minimal variance sum or product (JSON).
    Uncertainty(UncertaintyArgs),
}

#[derive(Debug, Args)]
pub struct OpsArgs {
    /// Comma-separated operator JSON files.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ops: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[command(flatten)]
    pub ops: OpsArgs,
    /// Number of support directions.
    #[arg(long, default_value_t = 360)]
    pub directions: usize,
    /// grid2d, fibonacci3d or seeded_uniform; defaults by dimension.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Recursion depth for degenerate faces.
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
}

#[derive(Debug, Args)]
pub struct ThermalArgs {
    #[command(flatten)]
    pub ops: OpsArgs,
    /// Comma-separated inverse temperatures; `inf` for the ground state.
    #[arg(long, value_delimiter = ',', required = true)]
    pub betas: Vec<String>,
    /// Number of fake normals per inverse temperature.
    #[arg(long, default_value_t = 360)]
    pub directions: usize,
    /// grid2d, fibonacci3d or seeded_uniform; defaults by dimension.
    #[arg(long)]
    pub strategy: Option<String>,
}

#[derive(Debug, Args)]
pub struct SeparableArgs {
    #[command(flatten)]
    pub ops: OpsArgs,
    /// Local dimensions `dA,dB`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Number of support directions.
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
    /// grid2d, fibonacci3d or seeded_uniform; defaults by dimension.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Seeded random starts per direction.
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Iteration cap per start.
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Stop once one sweep gains less than this.
    #[arg(long, default_value_t = 1e-11)]
    pub conv_tol: f64,
}

#[derive(Debug, Args)]
pub struct HamiltonianArgs {
    /// ising, xxzz, bicone or ellipse-segment.
    #[arg(long)]
    pub model: String,
    /// Number of spins; ignored by the two-qubit models.
    #[arg(long, default_value_t = 2)]
    pub sites: usize,
    /// Files are written as `<prefix>_H1.json`, `<prefix>_H2.json`, ...
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub ops: OpsArgs,
    /// Uniform angles over [0, 2 pi).
    #[arg(long, default_value_t = 720)]
    pub num_thetas: usize,
    /// Optional JSON report of ground-level crossings and flat faces.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyBoundsArgs {
    #[command(flatten)]
    pub ops: OpsArgs,
    /// Comma-separated parameter values with known energies.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub known: Vec<f64>,
    /// Comma-separated parameter values to bound.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub query: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct UncertaintyArgs {
    /// Operator file of the first observable.
    #[arg(long)]
    pub x: PathBuf,
    /// Operator file of the second observable.
    #[arg(long)]
    pub y: PathBuf,
    /// sum or product.
    #[arg(long, default_value = "sum")]
    pub kind: String,
    /// Number of support directions.
    #[arg(long, default_value_t = 1082)]
    pub directions: usize,
}

/// Failure of a run, split by exit status.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Module(JnrError),
}

impl From<JnrError> for RunError {
    fn from(e: JnrError) -> Self {
        RunError::Module(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Module(_) => 1,
        }
    }

    /// One-line JSON diagnostic.
    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            RunError::Config(m) => ("ConfigError", m.clone()),
            RunError::Module(e) => (e.kind(), e.to_string()),
        };
        serde_json::json!({ "error": kind, "message": message }).to_string()
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

fn config<T>(msg: impl Into<String>) -> RunResult<T> {
    Err(RunError::Config(msg.into()))
}

pub fn parse_operator_file(path: &Path) -> Result<HermitianOperator> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| JnrError::Io(format!("{}: {e}", path.display())))?;
    HermitianOperator::from_json_str(&text).map_err(|e| match e {
        JnrError::Parse { context, message } => JnrError::Parse {
            context: format!("{} {context}", path.display()),
            message,
        },
        other => other,
    })
}

fn load_set(paths: &[PathBuf]) -> Result<ObservableSet> {
    let ops = paths
        .iter()
        .map(|p| parse_operator_file(p))
        .collect::<Result<Vec<_>>>()?;
    let labels = paths
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect();
    ObservableSet::with_labels(ops, labels)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| JnrError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, contents.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| JnrError::Io(format!("stdout: {e}")))
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn push_row(buf: &mut String, fields: impl IntoIterator<Item = String>) {
    let row: Vec<String> = fields.into_iter().collect();
    buf.push_str(&row.join(","));
    buf.push('\n');
}

fn header(prefix: &str, k: usize) -> impl Iterator<Item = String> + '_ {
    (1..=k).map(move |i| format!("{prefix}_{i}"))
}

/// Shortest round-trip text; exponent form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn nums(v: &[f64]) -> impl Iterator<Item = String> + '_ {
    v.iter().map(|&x| num(x))
}

fn parse_strategy(name: &Option<String>, k: usize) -> RunResult<Strategy> {
    match name {
        None => Ok(Strategy::default_for(k)),
        Some(s) => s.parse().map_err(|e: JnrError| RunError::Config(e.to_string())),
    }
}

fn boundary_csv(k: usize, points: &[BoundaryPoint]) -> String {
    let mut buf = String::new();
    push_row(
        &mut buf,
        header("dir", k)
            .chain(header("p", k))
            .chain(["support".into(), "multiplicity".into(), "depth".into()]),
    );
    for p in points {
        push_row(
            &mut buf,
            nums(p.direction.as_slice())
                .chain(nums(&p.point))
                .chain([
                    num(p.support_value),
                    p.multiplicity.to_string(),
                    p.depth.to_string(),
                ]),
        );
    }
    buf
}

fn run_boundary(cli: &Cli, args: &BoundaryArgs) -> RunResult<()> {
    if args.directions < 1 {
        return config("--directions must be at least 1");
    }
    if args.max_depth < 1 {
        return config("--max-depth must be at least 1");
    }
    let set = load_set(&args.ops.ops)?;
    let k = set.k();
    let strategy = parse_strategy(&args.strategy, k)?;
    let points = if k == 2 && strategy == Strategy::Grid2d && args.directions >= 3 {
        let ops = set.operators();
        boundary_sweep_2d(&ops[0], &ops[1], args.directions, cli.gap_tol)?
    } else {
        let dirs = sample_directions(k, args.directions, strategy, cli.seed)?;
        let res = boundary_general(&set, &dirs, cli.gap_tol, args.max_depth)?;
        for i in &res.budget_exceeded {
            log::warn!("direction {i}: degenerate face not resolved within depth {}", args.max_depth);
        }
        res.points
    };
    emit(&cli.out, &boundary_csv(k, &points))?;
    Ok(())
}

fn run_classify(cli: &Cli, args: &OpsArgs) -> RunResult<()> {
    let set = load_set(&args.ops)?;
    let ops = set.operators();
    let report = match ops.len() {
        2 => classify_k2_qutrit(&ops[0], &ops[1])?,
        3 => classify_k3_qutrit(&ops[0], &ops[1], &ops[2])?,
        n => return config(format!("classify takes 2 or 3 operators, got {n}")),
    };
    emit(&cli.out, &json(&report))?;
    Ok(())
}

fn run_thermal(cli: &Cli, args: &ThermalArgs) -> RunResult<()> {
    let betas = args
        .betas
        .iter()
        .map(|b| b.parse::<Beta>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| RunError::Config(e.to_string()))?;
    if args.directions < 1 {
        return config("--directions must be at least 1");
    }
    let set = load_set(&args.ops.ops)?;
    let k = set.k();
    let strategy = parse_strategy(&args.strategy, k)?;
    let dirs = sample_directions(k, args.directions, strategy, cli.seed)?;
    let points = thermal_range_sweep(&set, &betas, &dirs)?;
    let mut buf = String::new();
    push_row(
        &mut buf,
        std::iter::once("beta".to_string())
            .chain(header("dir", k))
            .chain(header("p", k)),
    );
    for p in &points {
        push_row(
            &mut buf,
            std::iter::once(num(p.beta.value()))
                .chain(nums(p.fake_normal.as_slice()))
                .chain(nums(&p.point)),
        );
    }
    emit(&cli.out, &buf)?;
    Ok(())
}

fn run_separable(cli: &Cli, args: &SeparableArgs) -> RunResult<()> {
    if args.dims.len() != 2 || args.dims.contains(&0) {
        return config("--dims takes two positive local dimensions dA,dB");
    }
    if args.restarts < 1 || args.max_iters < 1 {
        return config("--restarts and --max-iters must be at least 1");
    }
    if args.conv_tol.is_nan() || args.conv_tol <= 0.0 {
        return config("--conv-tol must be positive");
    }
    let set = load_set(&args.ops.ops)?;
    let k = set.k();
    let strategy = parse_strategy(&args.strategy, k)?;
    let dirs = sample_directions(k, args.directions, strategy, cli.seed)?;
    let params = SeesawParams {
        restarts: args.restarts,
        max_iters: args.max_iters,
        conv_tol: args.conv_tol,
        seed: cli.seed,
    };
    let points = separable_boundary(&set, (args.dims[0], args.dims[1]), &dirs, &params)?;
    let mut buf = String::new();
    push_row(
        &mut buf,
        header("dir", k)
            .chain(header("p", k))
            .chain(["value".to_string()]),
    );
    for p in &points {
        push_row(
            &mut buf,
            nums(p.direction.as_slice())
                .chain(nums(&p.point))
                .chain([num(p.support_value)]),
        );
    }
    emit(&cli.out, &buf)?;
    Ok(())
}

fn run_hamiltonian(args: &HamiltonianArgs) -> RunResult<()> {
    let model: Model = args
        .model
        .parse()
        .map_err(|e: JnrError| RunError::Config(e.to_string()))?;
    let set = build_model(model, args.sites)?;
    let prefix = args.out_prefix.to_string_lossy();
    for (label, op) in set.labels().iter().zip(set.operators()) {
        let path = PathBuf::from(format!("{prefix}_{label}.json"));
        let mut text = op.to_json_string();
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
    }
    Ok(())
}

fn two_ops(set: &ObservableSet) -> RunResult<(HermitianOperator, HermitianOperator)> {
    match set.operators() {
        [a, b] => Ok((a.clone(), b.clone())),
        ops => config(format!("expected 2 operators, got {}", ops.len())),
    }
}

fn run_spectrum(cli: &Cli, args: &SpectrumArgs) -> RunResult<()> {
    if args.num_thetas < 8 {
        return config("--num-thetas must be at least 8");
    }
    let set = load_set(&args.ops.ops)?;
    let (h0, h1) = two_ops(&set)?;
    let sweep = spectrum_sweep(&h0, &h1, args.num_thetas)?;
    let d = h0.dim();
    let mut buf = String::new();
    push_row(
        &mut buf,
        std::iter::once("theta".to_string())
            .chain(header("level", d))
            .chain(["ground_gap".to_string()]),
    );
    for ((t, levels), g) in sweep.thetas.iter().zip(&sweep.levels).zip(&sweep.ground_gap) {
        push_row(
            &mut buf,
            std::iter::once(num(*t))
                .chain(nums(levels))
                .chain([num(*g)]),
        );
    }
    if let Some(path) = &args.report {
        let report = detect_ground_crossings(&h0, &h1, &sweep, cli.gap_tol)?;
        write_atomic(path, json(&report).as_bytes())?;
    }
    emit(&cli.out, &buf)?;
    Ok(())
}

#[derive(Serialize)]
struct EnergyReport {
    known: Vec<crate::phase::KnownEnergy>,
    bounds: Vec<crate::phase::EnergyBounds>,
}

fn run_energy_bounds(cli: &Cli, args: &EnergyBoundsArgs) -> RunResult<()> {
    if args.known.iter().chain(&args.query).any(|x| !x.is_finite()) {
        return config("--known and --query values must be finite");
    }
    let set = load_set(&args.ops.ops)?;
    let (h0, h1) = two_ops(&set)?;
    let known = args
        .known
        .iter()
        .map(|&a| known_energy(&h0, &h1, a, cli.gap_tol))
        .collect::<Result<Vec<_>>>()?;
    let bounds = args
        .query
        .iter()
        .map(|&q| energy_bounds(&known, q))
        .collect::<Result<Vec<_>>>()?;
    emit(&cli.out, &json(&EnergyReport { known, bounds }))?;
    Ok(())
}

#[derive(Serialize)]
struct UncertaintyReport {
    kind: VarianceKind,
    lower: f64,
    upper: f64,
    directions: usize,
    argmin_point: Vec<f64>,
    argmin_side: crate::uncertainty::ArgminSide,
    argmin_variances: Vec<f64>,
    lower_argmin_point: Vec<f64>,
}

fn run_uncertainty(cli: &Cli, args: &UncertaintyArgs) -> RunResult<()> {
    let kind: VarianceKind = args
        .kind
        .parse()
        .map_err(|e: JnrError| RunError::Config(e.to_string()))?;
    if args.directions < crate::uncertainty::MIN_DIRECTIONS {
        return config(format!(
            "--directions must be at least {}",
            crate::uncertainty::MIN_DIRECTIONS
        ));
    }
    let x = parse_operator_file(&args.x)?;
    let y = parse_operator_file(&args.y)?;
    let problem = uncertainty_lifted(&[x, y], kind)?;
    let b = uncertainty_bracket(&problem, args.directions, cli.gap_tol, cli.seed)?;
    let report = UncertaintyReport {
        kind,
        lower: b.lower,
        upper: b.upper,
        directions: b.num_directions,
        argmin_point: b.argmin_point,
        argmin_side: b.argmin_side,
        argmin_variances: b.argmin_variances,
        lower_argmin_point: b.lower_argmin_point,
    };
    emit(&cli.out, &json(&report))?;
    Ok(())
}

fn dispatch(cli: &Cli) -> RunResult<()> {
    if !(cli.gap_tol > 0.0 && cli.gap_tol < 1.0) {
        return config("--gap-tol must lie in (0, 1)");
    }
    match &cli.command {
        Command::Boundary(a) => run_boundary(cli, a),
        Command::Classify(a) => run_classify(cli, a),
        Command::Thermal(a) => run_thermal(cli, a),
        Command::Separable(a) => run_separable(cli, a),
        Command::Hamiltonian(a) => run_hamiltonian(a),
        Command::Spectrum(a) => run_spectrum(cli, a),
        Command::EnergyBounds(a) => run_energy_bounds(cli, a),
        Command::Uncertainty(a) => run_uncertainty(cli, a),
    }
}

/// Runs a parsed command line, optionally inside a dedicated thread pool.
pub fn run(cli: &Cli) -> RunResult<()> {
    if cli.threads == 0 {
        return dispatch(cli);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

/// Parses `args` (including the program name) and runs them; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let mut line = e.to_json();
            let _ = writeln!(line);
            eprint!("{line}");
            e.exit_code()
        }
    }
}
