use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bracket_bvp::eigen::principal_eigenvalue_with;
use bracket_bvp::greens::{build_fundamental_pair, green_sign_check, green_tensor};
use bracket_bvp::model::{compile_x_expr, eval_on_grid, parse_problem_text, problem_to_text, MeshFunction, ProblemSpec, ScalarFn};
use bracket_bvp::monotone::{solve_region, verify_lower, verify_upper, RegionSettings};
use bracket_bvp::problems::{catalog, catalog_entry};
use bracket_bvp::{BoundaryForm, BvpError, GridSpec};

use crate::args::{parse_args, Command, OutputFormat, ProblemSource, RunConfig};
use crate::output::{self, CatalogDoc, CertificateDoc, EigenDoc, GreenDoc, VerifyDoc};

#[derive(Debug)]
pub enum CliError {
    Solver(BvpError),
    Io { path: PathBuf, source: std::io::Error },
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Solver(e) => write!(f, "{}: {e}", e.kind()),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Input(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<BvpError> for CliError {
    fn from(e: BvpError) -> Self {
        CliError::Solver(e)
    }
}

/// Problem plus its starting functions, when known.
struct Loaded {
    problem: ProblemSpec,
    alpha0: Option<ScalarFn>,
    beta0: Option<ScalarFn>,
}

fn load(src: &ProblemSource) -> Result<Loaded, CliError> {
    match src {
        ProblemSource::CatalogIndex(i) => {
            let e = catalog_entry(*i).ok_or_else(|| CliError::Input(format!("no catalog entry {i}")))?;
            Ok(Loaded { problem: e.problem, alpha0: Some(e.alpha0), beta0: Some(e.beta0) })
        }
        ProblemSource::FilePath(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
            let def = parse_problem_text(&text)?;
            let compile = |s: &Option<String>| s.as_deref().map(compile_x_expr).transpose();
            Ok(Loaded { alpha0: compile(&def.alpha0_expr)?, beta0: compile(&def.beta0_expr)?, problem: def.problem })
        }
    }
}

fn starting_functions(l: &Loaded, g: &GridSpec) -> Result<(MeshFunction, MeshFunction), CliError> {
    let (Some(a), Some(b)) = (l.alpha0.clone(), l.beta0.clone()) else {
        return Err(CliError::Input("problem needs both `alpha0` and `beta0`".into()));
    };
    Ok((eval_on_grid(g, move |x| a(x))?, eval_on_grid(g, move |x| b(x))?))
}

/// Worker count from `BRACKET_BVP_THREADS`, else the machine's parallelism.
pub fn worker_threads() -> Result<usize, CliError> {
    match std::env::var("BRACKET_BVP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Input(format!("BRACKET_BVP_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn emit(cfg: &RunConfig, stdout: &mut dyn Write, body: &str) -> Result<(), CliError> {
    match &cfg.output_path {
        Some(p) => fs::write(p, body).map_err(|e| CliError::Io { path: p.clone(), source: e }),
        None => stdout.write_all(body.as_bytes()).map_err(|e| CliError::Io { path: "<stdout>".into(), source: e }),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

fn region_settings(cfg: &RunConfig) -> Result<RegionSettings, CliError> {
    Ok(RegionSettings {
        backend: cfg.backend,
        max_iters: cfg.max_iters,
        tol_sup: cfg.tol_sup,
        lambda_override: cfg.lambda_override,
        parallel: worker_threads()? >= 2,
        ..RegionSettings::new(cfg.grid)
    })
}

fn trace_path(prefix: &Path, direction: &str) -> PathBuf {
    PathBuf::from(format!("{}.{direction}.csv", prefix.display()))
}

/// Executes one invocation; `Ok(pass)` drives the exit status.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<bool, CliError> {
    match &cfg.command {
        Command::Solve { trace_prefix } => {
            let l = load(cfg.problem_source.as_ref().expect("solve has a problem"))?;
            let (a0, b0) = starting_functions(&l, &cfg.grid)?;
            let cert = solve_region(&l.problem, &a0, &b0, &region_settings(cfg)?);
            if let Some(prefix) = trace_prefix {
                for (name, t) in [("upper", &cert.upper_trace), ("lower", &cert.lower_trace)] {
                    if let Some(t) = t {
                        output::emit_trace_csv(t, &trace_path(prefix, name))?;
                    }
                }
            }
            let body = match cfg.output_format {
                OutputFormat::Json => json(&CertificateDoc::new(&cert)),
                OutputFormat::Csv => output::limits_csv(&cert),
                OutputFormat::Table => output::certificate_table(&cert),
            };
            emit(cfg, stdout, &body)?;
            Ok(cert.pass)
        }
        Command::Verify => {
            let l = load(cfg.problem_source.as_ref().expect("verify has a problem"))?;
            let (a0, b0) = starting_functions(&l, &cfg.grid)?;
            let lower = verify_lower(&l.problem, &a0)?;
            let upper = verify_upper(&l.problem, &b0)?;
            let doc = VerifyDoc { pass: lower.pass && upper.pass, lower, upper };
            let body = match cfg.output_format {
                OutputFormat::Json => json(&doc),
                OutputFormat::Csv => output::verify_csv(&doc),
                OutputFormat::Table => output::verify_table(&doc),
            };
            emit(cfg, stdout, &body)?;
            Ok(doc.pass)
        }
        Command::Green { dump_kernel, samples } => {
            let l = load(cfg.problem_source.as_ref().expect("green has a problem"))?;
            let lambda = match cfg.lambda_override {
                Some(x) => x,
                None => {
                    let (a0, b0) = starting_functions(&l, &cfg.grid)?;
                    let cert = solve_region(&l.problem, &a0, &b0, &RegionSettings::new(cfg.grid));
                    match (cert.lambda_used, cert.failure) {
                        (Some(x), _) => x,
                        (None, Some((kind, msg))) => return Err(CliError::Input(format!("no shift chosen ({kind}: {msg}); pass --lambda"))),
                        (None, None) => return Err(CliError::Input("no shift chosen; pass --lambda".into())),
                    }
                }
            };
            let fp = build_fundamental_pair(&l.problem, lambda, &cfg.grid)?;
            let report = green_sign_check(&fp, *samples)?;
            let p = &l.problem;
            let doc = GreenDoc { m: p.m, n: p.n, boundary: p.boundary, lambda, report };
            let body = if *dump_kernel {
                output::kernel_csv(&green_tensor(&fp, *samples)?)
            } else {
                match cfg.output_format {
                    OutputFormat::Json => json(&doc),
                    OutputFormat::Csv => output::green_csv(&doc),
                    OutputFormat::Table => output::green_table(&doc),
                }
            };
            emit(cfg, stdout, &body)?;
            Ok(report.pass)
        }
        Command::Eigen { operator, tol, scan } => {
            let (m, n, a1, a2) = match (operator, &cfg.problem_source) {
                (Some(o), _) => (o.m, o.n, o.a1, o.a2),
                (None, Some(src)) => {
                    let p = load(src)?.problem;
                    (p.m, p.n, p.boundary.a1, p.boundary.a2)
                }
                (None, None) => return Err(CliError::Input("eigen needs --problem or --m/--a1".into())),
            };
            let result = principal_eigenvalue_with(m, n, &BoundaryForm::new(a1, a2, 0.0), *tol, *scan)?;
            let doc = EigenDoc { m, n, a1, a2, result };
            let body = match cfg.output_format {
                OutputFormat::Json => json(&doc),
                OutputFormat::Csv => output::eigen_csv(&doc),
                OutputFormat::Table => output::eigen_table(&doc),
            };
            emit(cfg, stdout, &body)?;
            Ok(true)
        }
        Command::Catalog => {
            let entries: Vec<_> = match &cfg.problem_source {
                Some(ProblemSource::CatalogIndex(i)) => catalog().into_iter().filter(|e| e.index == *i).collect(),
                _ => catalog(),
            };
            let body = match cfg.output_format {
                OutputFormat::Json => json(&entries.iter().map(CatalogDoc::new).collect::<Vec<_>>()),
                OutputFormat::Csv => output::catalog_csv(&entries.iter().map(CatalogDoc::new).collect::<Vec<_>>()),
                OutputFormat::Table => {
                    let mut s = String::new();
                    for (k, e) in entries.iter().enumerate() {
                        if k > 0 {
                            s.push('\n');
                        }
                        s.push_str(&format!("# [{}] {}\n# region: {}\n", e.index, e.problem.label, e.region()));
                        s.push_str(&problem_to_text(&e.definition())?);
                    }
                    s
                }
            };
            emit(cfg, stdout, &body)?;
            Ok(true)
        }
    }
}

/// Parses `args`, runs, and maps the outcome to an exit status:
/// 0 pass, 1 failed check or solver error, 2 bad flags.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_args(args) {
        Ok(c) => c,
        Err(crate::ArgsError::Clap(e)) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return 2;
        }
    };
    match run(&cfg, stdout) {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "check failed");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
