//! Command-line harness: generate or ingest a system, partition it, build a
//! RAS/ARAS/ARAS2 preconditioner, solve, and report CSV/JSON.

pub mod spec;
pub mod table2;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use aras_core::aitken::{build_svd_space, proportional_split, random_basis, BasisOrigin, CoarseInterfaceSpace};
use aras_core::analysis::{
    analytic_spectrum, assemble_iteration_operator, condition_number, eigen_truncated_space, estimate_spectral_radius,
    spectral_radius, TwoDomainPoissonSpec,
};
use aras_core::aras::cost_report;
use aras_core::counters::{CounterSnapshot, Counters};
use aras_core::linalg::{dense_eigenvalues, read_matrix_market, read_vector, write_matrix_market, write_vector, SparseMatrix};
use aras_core::partition::{band_partition, extend_overlap, greedy_graph_partition, read_partition_file, OverlapPartition};
use aras_core::problems::{helmholtz2d, poisson2d, rhs_for_matrix, GridProblem, Rhs};
use aras_core::schwarz::{richardson_run, LocalSolve, RunStatus, ASSEMBLY_CAP};
use aras_core::{build_aras, gcr, gmres, ArasPreconditioner, ArasVariant, Preconditioner, RasPreconditioner, SchwarzMode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use spec::{BasisSpec, PartitionSpec, ProblemSpec};

/// Version of the JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] aras_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "aras-bench", version, about = "Aitken-accelerated RAS preconditioners: experiments and reports")]
pub struct Cli {
    /// Worker threads for subdomain-parallel work (1 keeps runs bit-reproducible).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated matrix (Matrix Market) and right-hand side (one value per line).
    Generate(GenerateArgs),
    /// Partition the unknowns and write a partition file.
    Partition(PartitionCmdArgs),
    /// Build a preconditioner, solve, and report the convergence history.
    Solve(SolveArgs),
    /// Spectrum of the iteration operator I − M⁻¹A (dense; small systems only).
    Analyze(AnalyzeArgs),
    /// Rerun the four two-domain Poisson configurations and compare with the reference values.
    #[command(name = "reproduce-table2")]
    ReproduceTable2(Table2Args),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Built-in problem: poisson:<m>, poisson:<mx>x<my> or helmholtz:<m>.
    #[arg(long, conflicts_with = "matrix")]
    pub problem: Option<ProblemSpec>,
    /// Matrix Market file to solve instead of a built-in problem.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Right-hand side file (one value per line) for --matrix.
    #[arg(long, requires = "matrix")]
    pub rhs_file: Option<PathBuf>,
    /// Right-hand side: manufactured, ones or random:<seed>.
    #[arg(long, default_value = "manufactured")]
    pub rhs: Rhs,
}

#[derive(Debug, Clone, Args)]
pub struct PartitionArgs {
    /// band, greedy or file:<path>.
    #[arg(long, default_value = "band")]
    pub partition: PartitionSpec,
    /// Number of subdomains (ignored for file partitions).
    #[arg(short = 'p', long = "subdomains", default_value_t = 2)]
    pub subdomains: usize,
    /// Overlap layers (a file partition carries its own).
    #[arg(long, default_value_t = 1)]
    pub delta: usize,
    /// Seed for the greedy partitioner's tie-breaking.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecondKind {
    Ras,
    Aras,
    Aras2,
}

#[derive(Debug, Clone, Args)]
pub struct PrecondArgs {
    #[arg(long, value_enum, default_value_t = PrecondKind::Ras)]
    pub precond: PrecondKind,
    /// Coarse basis for ARAS/ARAS2: random:<q>[,<seed>], svd:<q>[,<tol>], analytic-eigen:<k>, full or file:<path>.
    #[arg(long)]
    pub basis: Option<BasisSpec>,
    /// Local solve tolerance during the coarse-space build (default: exact LU).
    #[arg(long)]
    pub build_local_tol: Option<f64>,
    /// Save the coarse space (basis and P̂) for reuse with --basis file:<path>.
    #[arg(long)]
    pub save_basis: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Richardson,
    Gcr,
    Gmres,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub problem: ProblemSpec,
    #[arg(long, default_value = "manufactured")]
    pub rhs: Rhs,
    /// Matrix Market output.
    #[arg(long)]
    pub matrix_out: PathBuf,
    /// Right-hand side output.
    #[arg(long)]
    pub rhs_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PartitionCmdArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub partition: PartitionArgs,
    /// Partition file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[command(flatten)]
    pub precond: PrecondArgs,
    #[arg(long, value_enum, default_value_t = SolverKind::Gcr)]
    pub solver: SolverKind,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_it: usize,
    /// GMRES restart length (full GMRES when omitted).
    #[arg(long)]
    pub restart: Option<usize>,
    /// Per-iteration history `iter,precond_resid,true_resid`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON summary (printed to stdout when omitted).
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Report ρ(I − M⁻¹A): dense when the system is small enough, power estimate otherwise.
    #[arg(long)]
    pub rho: bool,
    /// Report κ₂(M⁻¹A) (dense; small systems only).
    #[arg(long)]
    pub kappa: bool,
    /// Exit with status 2 when the solver does not converge.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[command(flatten)]
    pub precond: PrecondArgs,
    /// Spectrum CSV `index,re,im,modulus` (largest modulus first).
    #[arg(long)]
    pub out: PathBuf,
    /// JSON summary (printed to stdout when omitted).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    /// JSON report.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Exit with status 2 when a value falls outside its tolerance.
    #[arg(long)]
    pub strict: bool,
}

/// What the caller needs to choose an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    /// False when a solve did not converge or a reference comparison failed.
    pub ok: bool,
    pub strict: bool,
}

impl Outcome {
    fn success() -> Self {
        Self { ok: true, strict: false }
    }

    pub fn exit_code(self) -> i32 {
        if self.ok || !self.strict {
            0
        } else {
            2
        }
    }
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(o) => o.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    if cli.threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    // The global pool can only be configured once per process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Partition(a) => cmd_partition(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::ReproduceTable2(a) => table2::cmd_reproduce_table2(&a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// A linear system ready to partition.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub description: String,
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Present for built-in problems.
    pub grid: Option<GridProblem>,
}

pub fn generate(spec: ProblemSpec, rhs: Rhs) -> Result<GridProblem> {
    let p = match spec {
        ProblemSpec::Poisson { m_x, m_y } => poisson2d(m_x, m_y)?,
        ProblemSpec::Helmholtz { m } => helmholtz2d(m)?,
    };
    Ok(p.with_rhs(rhs))
}

pub fn load_problem(args: &ProblemArgs) -> Result<LoadedProblem> {
    match (&args.problem, &args.matrix) {
        (Some(spec), None) => {
            let g = generate(*spec, args.rhs)?;
            Ok(LoadedProblem { description: spec.to_string(), matrix: g.matrix.clone(), rhs: g.rhs.clone(), grid: Some(g) })
        }
        (None, Some(path)) => {
            let matrix = read_matrix_market(open(path)?)?;
            if !matrix.is_square() {
                return Err(CliError::Config(format!("{}: matrix is {}×{}, expected square", path.display(), matrix.nrows(), matrix.ncols())));
            }
            let n = matrix.nrows();
            let rhs = match &args.rhs_file {
                Some(rp) => {
                    let v = read_vector(open(rp)?)?;
                    if v.len() != n {
                        return Err(CliError::Config(format!("{}: {} values, matrix has {n} rows", rp.display(), v.len())));
                    }
                    v
                }
                None => rhs_for_matrix(&matrix, args.rhs),
            };
            Ok(LoadedProblem { description: path.display().to_string(), matrix, rhs, grid: None })
        }
        (None, None) => Err(CliError::Config("no system given: pass --problem <spec> or --matrix <file.mtx>".into())),
        (Some(_), Some(_)) => Err(CliError::Config("--problem and --matrix are mutually exclusive".into())),
    }
}

pub fn build_partition(a: &SparseMatrix, args: &PartitionArgs) -> Result<OverlapPartition> {
    let n = a.nrows();
    let (owned, delta) = match &args.partition {
        PartitionSpec::Band => (band_partition(n, args.subdomains)?, args.delta),
        PartitionSpec::Greedy => (greedy_graph_partition(a, args.subdomains, args.seed)?, args.delta),
        PartitionSpec::File(path) => read_partition_file(open(path)?, n)?,
    };
    Ok(extend_overlap(a, &owned, delta)?)
}

/// A built preconditioner plus what it took to build it.
pub struct Built {
    pub ras: Arc<RasPreconditioner>,
    pub aras: Option<ArasPreconditioner>,
    pub build_counts: CounterSnapshot,
    pub build_secs: f64,
}

impl Built {
    pub fn preconditioner(&self) -> &dyn Preconditioner {
        match &self.aras {
            Some(m) => m,
            None => &*self.ras,
        }
    }
}

fn coarse_space(
    problem: &LoadedProblem,
    ras: &RasPreconditioner,
    basis: &BasisSpec,
) -> Result<CoarseInterfaceSpace> {
    let a = &problem.matrix;
    let part = ras.partition();
    let n = part.interface_len();
    let too_big = |what: &str, q: usize| {
        CliError::Config(format!("{what} = {q} exceeds the interface size {n} of this partition; use at most {n} or --basis full"))
    };
    Ok(match basis {
        BasisSpec::Random { q, seed } => {
            if *q > n {
                return Err(too_big("q", *q));
            }
            let u = random_basis(n, &proportional_split(*q, part), *seed, part)?;
            CoarseInterfaceSpace::from_basis(a, ras, u, BasisOrigin::Random)?
        }
        BasisSpec::Svd { q, tol } => {
            if *q > n {
                return Err(too_big("q", *q));
            }
            build_svd_space(a, ras, &problem.rhs, &vec![0.0; a.nrows()], *q, *tol)?
        }
        BasisSpec::AnalyticEigen { k } => {
            if *k > n {
                return Err(too_big("k", *k));
            }
            eigen_truncated_space(a, ras, *k)?
        }
        BasisSpec::Full => CoarseInterfaceSpace::full(a, ras)?,
        BasisSpec::File(path) => {
            let s = CoarseInterfaceSpace::load(open(path)?)?;
            if s.n() != n {
                return Err(CliError::Config(format!(
                    "{}: coarse space has interface size {}, this partition has {n}",
                    path.display(),
                    s.n()
                )));
            }
            s
        }
    })
}

pub fn build_preconditioner(problem: &LoadedProblem, part: Arc<OverlapPartition>, args: &PrecondArgs) -> Result<Built> {
    let a = &problem.matrix;
    let start = Instant::now();
    let ras = Arc::new(RasPreconditioner::build(a, part.clone(), SchwarzMode::Ras, LocalSolve::Exact, Arc::new(Counters::new()))?);
    let variant = match args.precond {
        PrecondKind::Ras => {
            if args.basis.is_some() {
                return Err(CliError::Config("--basis only applies to --precond aras or aras2".into()));
            }
            let build_counts = ras.counters().snapshot();
            return Ok(Built { ras, aras: None, build_counts, build_secs: start.elapsed().as_secs_f64() });
        }
        PrecondKind::Aras => ArasVariant::Aras,
        PrecondKind::Aras2 => ArasVariant::Aras2,
    };
    let basis = args
        .basis
        .as_ref()
        .ok_or_else(|| CliError::Config("--precond aras/aras2 needs --basis (e.g. svd:24 or random:16,1)".into()))?;
    // The build phase may use looser local solves; applications always use LU.
    let build_ras = match args.build_local_tol {
        Some(tol) if tol > 0.0 => Arc::new(RasPreconditioner::build(
            a,
            part,
            SchwarzMode::Ras,
            LocalSolve::Iterative { tol },
            Arc::new(Counters::new()),
        )?),
        Some(tol) => return Err(CliError::Config(format!("--build-local-tol must be positive, got {tol}"))),
        None => ras.clone(),
    };
    let before = build_ras.counters().snapshot();
    let space = coarse_space(problem, &build_ras, basis)?;
    let build_counts = build_ras.counters().snapshot() - before;
    if let Some(path) = &args.save_basis {
        let mut w = create(path)?;
        space.save(&mut w)?;
        w.flush().map_err(io_err(path))?;
    }
    let aras = build_aras(a, ras.clone(), space, variant)?;
    Ok(Built { ras, aras: Some(aras), build_counts, build_secs: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct Counts {
    pub local_solves: u64,
    pub spmv: u64,
    pub svd: u64,
}

impl From<CounterSnapshot> for Counts {
    fn from(c: CounterSnapshot) -> Self {
        Self { local_solves: c.local_solves, spmv: c.spmv, svd: c.svd }
    }
}

#[derive(Debug, Serialize)]
pub struct PartitionSummary {
    pub spec: String,
    pub subdomains: usize,
    pub overlap: usize,
    pub interface: usize,
    pub owned_sizes: Vec<usize>,
}

impl PartitionSummary {
    fn new(spec: &PartitionSpec, part: &OverlapPartition) -> Self {
        Self {
            spec: spec.to_string(),
            subdomains: part.num_subdomains(),
            overlap: part.overlap(),
            interface: part.interface_len(),
            owned_sizes: part.owned_sets().iter().map(|s| s.len()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PrecondSummary {
    pub label: String,
    pub basis: Option<String>,
    pub q: Option<usize>,
    pub build_local_tol: Option<f64>,
    /// Model costs per application and for the build.
    pub ras_per_apply: usize,
    pub spmv_per_apply: usize,
    pub build_bound_application: Option<usize>,
    pub build_bound_inversion: Option<usize>,
}

impl PrecondSummary {
    fn new(built: &Built, args: &PrecondArgs) -> Self {
        match &built.aras {
            Some(m) => {
                let c = cost_report(m);
                Self {
                    label: m.label(),
                    basis: args.basis.as_ref().map(|b| b.to_string()),
                    q: Some(m.q()),
                    build_local_tol: args.build_local_tol,
                    ras_per_apply: c.ras_per_apply,
                    spmv_per_apply: c.spmv_per_apply,
                    build_bound_application: Some(c.build_bound_application),
                    build_bound_inversion: Some(c.build_bound_inversion),
                }
            }
            None => Self {
                label: built.ras.label(),
                basis: None,
                q: None,
                build_local_tol: None,
                ras_per_apply: 1,
                spmv_per_apply: 0,
                build_bound_application: None,
                build_bound_inversion: None,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub setup_secs: f64,
    pub build_secs: f64,
    pub solve_secs: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub schema: u32,
    pub command: &'static str,
    pub problem: String,
    pub dimension: usize,
    pub partition: PartitionSummary,
    pub preconditioner: PrecondSummary,
    pub solver: String,
    pub tol: f64,
    pub max_it: usize,
    pub restart: Option<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub status: String,
    pub final_true_residual: f64,
    /// Present with --rho; `rho_method` is `dense` or `power`.
    pub rho: Option<f64>,
    pub rho_method: Option<&'static str>,
    pub kappa: Option<f64>,
    pub counters_build: Counts,
    pub counters_solve: Counts,
    pub timings: Timings,
}

/// One row of the convergence history.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct HistoryRow {
    pub iter: usize,
    /// Empty for the last Richardson iterate (no correction was computed from it).
    pub precond_resid: Option<f64>,
    pub true_resid: f64,
}

pub struct SolveRun {
    pub summary: SolveSummary,
    pub history: Vec<HistoryRow>,
}

pub fn solve(args: &SolveArgs) -> Result<SolveRun> {
    let setup = Instant::now();
    let problem = load_problem(&args.problem)?;
    let a = &problem.matrix;
    let n = a.nrows();
    let part = Arc::new(build_partition(a, &args.partition)?);
    let setup_secs = setup.elapsed().as_secs_f64();
    let built = build_preconditioner(&problem, part.clone(), &args.precond)?;
    let m = built.preconditioner();
    let x0 = vec![0.0; n];

    let before = m.counters().snapshot();
    let solve_start = Instant::now();
    let (iterations, converged, status, final_true, mut history, driver_spmv) = match args.solver {
        SolverKind::Richardson => {
            let t = richardson_run(a, m, &problem.rhs, &x0, args.tol, args.max_it)?;
            let z0 = t.correction_norms.first().copied().filter(|z| *z > 0.0).unwrap_or(1.0);
            let history: Vec<HistoryRow> = t
                .residual_norms
                .iter()
                .enumerate()
                .map(|(k, &r)| HistoryRow { iter: k, precond_resid: t.correction_norms.get(k).map(|z| z / z0), true_resid: r })
                .collect();
            let status = match t.status {
                RunStatus::Converged => "converged",
                RunStatus::MaxIterations => "max_iterations",
                RunStatus::Diverged => "diverged",
                RunStatus::NonFinite => "non_finite",
            };
            (t.iterations, t.converged(), status, *t.residual_norms.last().unwrap(), history, t.spmv)
        }
        SolverKind::Gcr | SolverKind::Gmres => {
            let r = if args.solver == SolverKind::Gcr {
                gcr(a, m, &problem.rhs, &x0, args.tol, args.max_it)?
            } else {
                gmres(a, m, &problem.rhs, &x0, args.tol, args.max_it, args.restart)?
            };
            let history = r
                .precond_residuals
                .iter()
                .zip(&r.true_residuals)
                .enumerate()
                .map(|(k, (&p, &t))| HistoryRow { iter: k, precond_resid: Some(p), true_resid: t })
                .collect();
            let status = if r.converged { "converged" } else { "max_iterations" };
            (r.iterations, r.converged, status, r.final_true_residual, history, r.spmv)
        }
    };
    let solve_secs = solve_start.elapsed().as_secs_f64();
    let mut solve_counts = Counts::from(m.counters().snapshot() - before);
    solve_counts.spmv += driver_spmv;
    history.truncate(iterations + 1);

    let (rho, rho_method) = if args.rho {
        if n <= ASSEMBLY_CAP {
            (Some(spectral_radius(a, m)?), Some("dense"))
        } else {
            (Some(estimate_spectral_radius(a, m, 200, 0)?), Some("power"))
        }
    } else {
        (None, None)
    };
    let kappa = if args.kappa {
        if n > ASSEMBLY_CAP {
            return Err(CliError::Config(format!("--kappa assembles M⁻¹A densely; dimension {n} exceeds {ASSEMBLY_CAP}")));
        }
        Some(condition_number(a, m)?)
    } else {
        None
    };

    let summary = SolveSummary {
        schema: SCHEMA_VERSION,
        command: "solve",
        problem: problem.description.clone(),
        dimension: n,
        partition: PartitionSummary::new(&args.partition.partition, &part),
        preconditioner: PrecondSummary::new(&built, &args.precond),
        solver: format!("{:?}", args.solver).to_lowercase(),
        tol: args.tol,
        max_it: args.max_it,
        restart: args.restart,
        iterations,
        converged,
        status: status.to_string(),
        final_true_residual: final_true,
        rho,
        rho_method,
        kappa,
        counters_build: built.build_counts.into(),
        counters_solve: solve_counts,
        timings: Timings { setup_secs, build_secs: built.build_secs, solve_secs },
    };
    Ok(SolveRun { summary, history })
}

pub fn write_history<W: Write>(rows: &[HistoryRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "precond_resid", "true_resid"])?;
    for r in rows {
        out.write_record([r.iter.to_string(), r.precond_resid.map(|v| v.to_string()).unwrap_or_default(), r.true_resid.to_string()])?;
    }
    out.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
pub(crate) fn write_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io { path: "<stdout>".into(), source: e }),
        _ => Ok(()),
    }
}

pub(crate) fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w).map_err(io_err(p))?;
            w.flush().map_err(io_err(p))?;
        }
        None => {
            let text = serde_json::to_string_pretty(value)?;
            write_stdout(&format!("{text}\n"))?;
        }
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<Outcome> {
    let run = solve(args)?;
    if let Some(p) = &args.csv {
        let mut w = create(p)?;
        write_history(&run.history, &mut w)?;
        w.flush().map_err(io_err(p))?;
    }
    emit_json(&run.summary, args.json.as_deref())?;
    if !run.summary.converged {
        eprintln!(
            "warning: {} did not converge ({}, {} iterations, true residual {:e})",
            run.summary.solver, run.summary.status, run.summary.iterations, run.summary.final_true_residual
        );
    }
    Ok(Outcome { ok: run.summary.converged, strict: args.strict })
}

fn cmd_generate(args: &GenerateArgs) -> Result<Outcome> {
    let g = generate(args.problem, args.rhs)?;
    let mut w = create(&args.matrix_out)?;
    write_matrix_market(&g.matrix, &mut w)?;
    w.flush().map_err(io_err(&args.matrix_out))?;
    let mut w = create(&args.rhs_out)?;
    write_vector(&g.rhs, &mut w)?;
    w.flush().map_err(io_err(&args.rhs_out))?;
    eprintln!("{}: {} unknowns, {} nonzeros", args.problem, g.matrix.nrows(), g.matrix.nnz());
    Ok(Outcome::success())
}

fn cmd_partition(args: &PartitionCmdArgs) -> Result<Outcome> {
    let problem = load_problem(&args.problem)?;
    let part = build_partition(&problem.matrix, &args.partition)?;
    let mut w = create(&args.out)?;
    part.save(&mut w)?;
    w.flush().map_err(io_err(&args.out))?;
    let s = PartitionSummary::new(&args.partition.partition, &part);
    eprintln!("{} subdomains, overlap {}, interface {}, owned sizes {:?}", s.subdomains, s.overlap, s.interface, s.owned_sizes);
    Ok(Outcome::success())
}

#[derive(Debug, Serialize)]
pub struct AnalyzeSummary {
    pub schema: u32,
    pub command: &'static str,
    pub problem: String,
    pub dimension: usize,
    pub partition: PartitionSummary,
    pub preconditioner: PrecondSummary,
    pub rho: f64,
    pub kappa: f64,
    /// Two-domain band-split Poisson only: analytic interface modes `δ_l`.
    pub analytic_modes: Option<Vec<f64>>,
    /// `max |λ|` of the analytic interface spectrum (ρ of RAS).
    pub analytic_rho: Option<f64>,
}

fn analytic_modes(problem: &LoadedProblem, args: &PartitionArgs, part: &OverlapPartition) -> Option<Vec<f64>> {
    let g = problem.grid.as_ref()?;
    let aligned = (g.m_x - 2) % 2 == 0;
    if args.partition != PartitionSpec::Band || part.num_subdomains() != 2 || !aligned || g.extent_y != std::f64::consts::PI {
        return None;
    }
    let spec = TwoDomainPoissonSpec::band_split(g.m_x, g.m_y, part.overlap()).ok()?;
    aras_core::analysis::analytic_interface_modes(&spec).ok()
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let problem = load_problem(&args.problem)?;
    let a = &problem.matrix;
    let n = a.nrows();
    if n > ASSEMBLY_CAP {
        return Err(CliError::Config(format!("analyze assembles I − M⁻¹A densely; dimension {n} exceeds {ASSEMBLY_CAP}")));
    }
    let part = Arc::new(build_partition(a, &args.partition)?);
    let built = build_preconditioner(&problem, part.clone(), &args.precond)?;
    let m = built.preconditioner();
    let t = assemble_iteration_operator(a, m)?;
    let eig = dense_eigenvalues(&t)?;
    let mut out = csv::Writer::from_writer(create(&args.out)?);
    out.write_record(["index", "re", "im", "modulus"])?;
    for (k, z) in eig.iter().enumerate() {
        out.write_record([k.to_string(), z.re.to_string(), z.im.to_string(), z.norm().to_string()])?;
    }
    out.flush().map_err(io_err(&args.out))?;
    let modes = analytic_modes(&problem, &args.partition, &part);
    let analytic_rho = match (&modes, &problem.grid) {
        (Some(_), Some(g)) => TwoDomainPoissonSpec::band_split(g.m_x, g.m_y, part.overlap())
            .ok()
            .and_then(|s| analytic_spectrum(&s).ok())
            .and_then(|s| s.first().map(|z| z.norm())),
        _ => None,
    };
    let summary = AnalyzeSummary {
        schema: SCHEMA_VERSION,
        command: "analyze",
        problem: problem.description.clone(),
        dimension: n,
        partition: PartitionSummary::new(&args.partition.partition, &part),
        preconditioner: PrecondSummary::new(&built, &args.precond),
        rho: eig.first().map_or(0.0, |z| z.norm()),
        kappa: condition_number(a, m)?,
        analytic_modes: modes,
        analytic_rho,
    };
    emit_json(&summary, args.json.as_deref())?;
    Ok(Outcome::success())
}
