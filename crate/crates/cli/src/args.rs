use std::path::PathBuf;

use bracket_bvp::model::GridSpec;
use bracket_bvp::monotone::Backend;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Green,
    Fdm,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Green => Backend::Green,
            BackendArg::Fdm => Backend::Fdm,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    CatalogIndex(usize),
    FilePath(PathBuf),
}

/// Coefficients given directly to `eigen`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub m: f64,
    pub n: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Solve { trace_prefix: Option<PathBuf> },
    Verify,
    Green { dump_kernel: bool, samples: usize },
    Eigen { operator: Option<OperatorParams>, tol: f64, scan: f64 },
    Catalog,
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem_source: Option<ProblemSource>,
    pub grid: GridSpec,
    pub backend: Backend,
    pub lambda_override: Option<f64>,
    pub tol_sup: f64,
    pub max_iters: usize,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "bracket-bvp", version, about = "Existence brackets for singular two-point boundary value problems")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run both monotone sequences and print the existence certificate.
    Solve(SolveArgs),
    /// Check the upper and lower solution inequalities.
    Verify(VerifyArgs),
    /// Sign check of the Green's kernel, optionally dumping it.
    Green(GreenArgs),
    /// Principal eigenvalue of the linear operator.
    Eigen(EigenArgs),
    /// List the built-in problems in the key-value problem format.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Catalog index 1..6 or a path to a problem file.
    #[arg(long)]
    problem: String,
    /// Odd number of grid nodes, at least 9.
    #[arg(long, default_value_t = 257)]
    nodes: usize,
    /// Grade the grid toward x = 0 with nodes (i/N)^p.
    #[arg(long, value_name = "P")]
    grading: Option<f64>,
}

#[derive(Debug, Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the main document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = BackendArg::Fdm)]
    backend: BackendArg,
    /// Fixed shift instead of the automatic choice.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Stop when consecutive iterates differ by at most this in sup norm.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Also write PREFIX.upper.csv, PREFIX.lower.csv and their summaries.
    #[arg(long, value_name = "PREFIX")]
    trace: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct GreenArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Shift of the kernel; defaults to the one `solve` would choose.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Write `x,t,G` on the sampling grid instead of the sign report.
    #[arg(long)]
    dump_kernel: bool,
    /// Sampling points per axis.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct EigenArgs {
    /// Take the coefficients from a catalog entry or problem file.
    #[arg(long, conflicts_with_all = ["m", "n", "a1", "a2"])]
    problem: Option<String>,
    #[arg(long, required_unless_present = "problem")]
    m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<f64>,
    #[arg(long, required_unless_present = "problem")]
    a1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    /// Bisection width.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Upper end of the scanned shift range.
    #[arg(long, default_value_t = bracket_bvp::eigen::DEFAULT_LAMBDA_SCAN)]
    scan: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    /// Print a single entry.
    #[arg(long)]
    problem: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn problem_source(raw: &str) -> Result<ProblemSource, String> {
    match raw.parse::<usize>() {
        Ok(i) if (1..=6).contains(&i) => Ok(ProblemSource::CatalogIndex(i)),
        Ok(i) => Err(format!("catalog index must be in 1..6, got {i}")),
        Err(_) => Ok(ProblemSource::FilePath(PathBuf::from(raw))),
    }
}

fn grid_of(g: &GridArgs) -> GridSpec {
    match g.grading {
        Some(p) => GridSpec::graded(g.nodes, p),
        None => GridSpec::uniform(g.nodes),
    }
}

/// Usage problem; the binary exits with status 2.
#[derive(Debug)]
pub enum ArgsError {
    Clap(clap::Error),
    Invalid(String),
}

impl std::fmt::Display for ArgsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArgsError::Clap(e) => write!(f, "{e}"),
            ArgsError::Invalid(msg) => write!(f, "error: {msg}"),
        }
    }
}

pub fn parse_args<I, T>(args: I) -> Result<RunConfig, ArgsError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ArgsError::Clap)?;
    let base = |command, source, grid, format, out| RunConfig {
        command,
        problem_source: source,
        grid,
        backend: Backend::Fdm,
        lambda_override: None,
        tol_sup: 1e-12,
        max_iters: 500,
        output_format: format,
        output_path: out,
    };
    let invalid = ArgsError::Invalid;
    Ok(match cli.command {
        Sub::Solve(a) => {
            let src = problem_source(&a.grid.problem).map_err(invalid)?;
            RunConfig {
                backend: a.backend.into(),
                lambda_override: a.lambda,
                tol_sup: a.tol,
                max_iters: a.max_iters,
                ..base(Command::Solve { trace_prefix: a.trace }, Some(src), grid_of(&a.grid), a.out.format, a.out.out)
            }
        }
        Sub::Verify(a) => {
            let src = problem_source(&a.grid.problem).map_err(invalid)?;
            base(Command::Verify, Some(src), grid_of(&a.grid), a.out.format, a.out.out)
        }
        Sub::Green(a) => {
            let src = problem_source(&a.grid.problem).map_err(invalid)?;
            RunConfig {
                lambda_override: a.lambda,
                ..base(
                    Command::Green { dump_kernel: a.dump_kernel, samples: a.samples },
                    Some(src),
                    grid_of(&a.grid),
                    a.out.format,
                    a.out.out,
                )
            }
        }
        Sub::Eigen(a) => {
            let src = a.problem.as_deref().map(problem_source).transpose().map_err(invalid)?;
            // clap guarantees m and a1 whenever --problem is absent
            let operator = match (&src, a.m, a.a1) {
                (None, Some(m), Some(a1)) => Some(OperatorParams { m, n: a.n.unwrap_or(0.0), a1, a2: a.a2.unwrap_or(0.0) }),
                _ => None,
            };
            let command = Command::Eigen { operator, tol: a.tol, scan: a.scan };
            base(command, src, GridSpec::uniform(257), a.out.format, a.out.out)
        }
        Sub::Catalog(a) => {
            let src = a
                .problem
                .map(|i| problem_source(&i.to_string()))
                .transpose()
                .map_err(invalid)?;
            base(Command::Catalog, src, GridSpec::uniform(257), a.format, a.out)
        }
    })
}
