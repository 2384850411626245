//! Serialized forms of certificates, reports and traces.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bracket_bvp::eigen::EigenResult;
use bracket_bvp::greens::SignReport;
use bracket_bvp::model::{BoundaryForm, GridSpec};
use bracket_bvp::monotone::{Backend, ExistenceCertificate, IterationTrace, SlopeBounds, Theorem, VerificationReport};
use bracket_bvp::problems::CatalogEntry;
use serde::Serialize;

use crate::CliError;

/// CSV cells carry 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Serialize)]
pub struct ProblemDoc {
    pub label: String,
    pub m: f64,
    pub n: f64,
    #[serde(flatten)]
    pub boundary: BoundaryForm,
    pub f_expr: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct FailureDoc {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct SequenceDoc {
    pub iterations: usize,
    pub converged: bool,
    pub monotone_violation: f64,
    pub final_delta: Option<f64>,
}

impl SequenceDoc {
    fn of(t: &IterationTrace) -> Self {
        SequenceDoc {
            iterations: t.deltas.len(),
            converged: t.converged,
            monotone_violation: t.monotone_violation,
            final_delta: t.deltas.last().copied(),
        }
    }
}

/// JSON shape of an [`ExistenceCertificate`].
#[derive(Debug, Serialize)]
pub struct CertificateDoc {
    pub pass: bool,
    pub problem: ProblemDoc,
    pub grid: GridSpec,
    pub backend: Backend,
    pub theorem: Option<Theorem>,
    pub lambda_used: Option<f64>,
    #[serde(rename = "L_used")]
    pub l_used: Option<f64>,
    #[serde(rename = "L_published")]
    pub l_published: Option<f64>,
    pub lambda0: Option<f64>,
    pub slopes: Option<SlopeBounds>,
    pub upper_report: Option<VerificationReport>,
    pub lower_report: Option<VerificationReport>,
    pub upper_sequence: Option<SequenceDoc>,
    pub lower_sequence: Option<SequenceDoc>,
    pub bracket_gap: Option<f64>,
    pub residual_sup: Option<f64>,
    pub ordering_violation: Option<f64>,
    pub failure: Option<FailureDoc>,
    pub notes: Vec<String>,
    pub nodes: Vec<f64>,
    pub alpha_limit: Option<Vec<f64>>,
    pub beta_limit: Option<Vec<f64>>,
}

impl CertificateDoc {
    pub fn new(c: &ExistenceCertificate) -> Self {
        let p = &c.problem;
        let nodes = c.grid.nodes().map(|n| n.to_vec()).unwrap_or_default();
        CertificateDoc {
            pass: c.pass,
            problem: ProblemDoc { label: p.label.clone(), m: p.m, n: p.n, boundary: p.boundary, f_expr: p.f_expr.clone() },
            grid: c.grid,
            backend: c.backend,
            theorem: c.theorem,
            lambda_used: c.lambda_used,
            l_used: c.l_used,
            l_published: c.l_published,
            lambda0: c.lambda0,
            slopes: c.slopes,
            upper_report: c.upper_report,
            lower_report: c.lower_report,
            upper_sequence: c.upper_trace.as_ref().map(SequenceDoc::of),
            lower_sequence: c.lower_trace.as_ref().map(SequenceDoc::of),
            bracket_gap: c.bracket_gap,
            residual_sup: c.residual_sup,
            ordering_violation: c.ordering_violation,
            failure: c.failure.as_ref().map(|(k, m)| FailureDoc { kind: k.clone(), message: m.clone() }),
            notes: c.notes.clone(),
            nodes,
            alpha_limit: c.alpha_limit.as_ref().map(|s| s.values.clone()),
            beta_limit: c.beta_limit.as_ref().map(|s| s.values.clone()),
        }
    }
}

fn short(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(short).unwrap_or_else(|| "-".into())
}

pub fn certificate_table(c: &ExistenceCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "problem            {}", c.problem.label);
    let _ = writeln!(s, "grid               {} nodes, {}", c.grid.node_count, match c.grid.grading {
        bracket_bvp::model::Grading::Uniform => "uniform".to_string(),
        bracket_bvp::model::Grading::GradedToward0 => format!("graded (exponent {})", c.grid.grading_exponent),
    });
    let _ = writeln!(s, "backend            {}", format!("{:?}", c.backend).to_lowercase());
    for r in [c.lower_report, c.upper_report].into_iter().flatten() {
        let _ = writeln!(
            s,
            "{:<18} {} margin {} at x = {}, s'(0) {:e}, boundary {}",
            format!("{:?} solution", r.kind).to_lowercase(),
            if r.pass { "PASS" } else { "FAIL" },
            short(r.interior_margin),
            r.worst_x,
            r.boundary_margin_0,
            short(r.boundary_margin_1)
        );
    }
    let _ = writeln!(s, "theorem            {}", c.theorem.map(|t| format!("{t:?}").to_lowercase()).unwrap_or_else(|| "-".into()));
    let _ = writeln!(s, "lambda             {}", opt(c.lambda_used));
    let _ = writeln!(s, "L (engine)         {}", opt(c.l_used));
    let _ = writeln!(s, "L (published)      {}", opt(c.l_published));
    let _ = writeln!(s, "lambda0            {}", opt(c.lambda0));
    for (name, t) in [("upper", &c.upper_trace), ("lower", &c.lower_trace)] {
        if let Some(t) = t {
            let _ = writeln!(
                s,
                "{name} sequence     {} iterations, converged {}, violation {:e}",
                t.deltas.len(),
                t.converged,
                t.monotone_violation
            );
        }
    }
    let _ = writeln!(s, "bracket gap        {}", opt(c.bracket_gap));
    let _ = writeln!(s, "residual           {}", opt(c.residual_sup));
    let _ = writeln!(s, "ordering           {}", opt(c.ordering_violation));
    if let Some((k, m)) = &c.failure {
        let _ = writeln!(s, "failure            {k}: {m}");
    }
    for n in &c.notes {
        let _ = writeln!(s, "note               {n}");
    }
    let _ = writeln!(s, "result             {}", if c.pass { "PASS" } else { "FAIL" });
    s
}

/// `x,alpha_limit,beta_limit`; empty body when the run stopped early.
pub fn limits_csv(c: &ExistenceCertificate) -> String {
    let mut s = String::from("x,alpha_limit,beta_limit\n");
    if let (Some(a), Some(b)) = (&c.alpha_limit, &c.beta_limit) {
        for i in 0..a.len() {
            let _ = writeln!(s, "{},{},{}", num(a.nodes[i]), num(a.values[i]), num(b.values[i]));
        }
    }
    s
}

#[derive(Debug, Serialize)]
pub struct VerifyDoc {
    pub pass: bool,
    pub lower: VerificationReport,
    pub upper: VerificationReport,
}

pub fn verify_csv(d: &VerifyDoc) -> String {
    let mut s = String::from("kind,interior_margin,worst_x,boundary_margin_0,boundary_margin_1,pass\n");
    for r in [d.lower, d.upper] {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            format!("{:?}", r.kind).to_lowercase(),
            num(r.interior_margin),
            num(r.worst_x),
            num(r.boundary_margin_0),
            num(r.boundary_margin_1),
            r.pass
        );
    }
    s
}

pub fn verify_table(d: &VerifyDoc) -> String {
    let mut s = String::new();
    for r in [d.lower, d.upper] {
        let _ = writeln!(
            s,
            "{:<6} {} interior {} (x = {}), s'(0) {:e}, boundary {}",
            format!("{:?}", r.kind).to_lowercase(),
            if r.pass { "PASS" } else { "FAIL" },
            r.interior_margin,
            r.worst_x,
            r.boundary_margin_0,
            r.boundary_margin_1
        );
    }
    s
}

#[derive(Debug, Serialize)]
pub struct GreenDoc {
    pub m: f64,
    pub n: f64,
    #[serde(flatten)]
    pub boundary: BoundaryForm,
    pub lambda: f64,
    #[serde(flatten)]
    pub report: SignReport,
}

pub fn green_csv(d: &GreenDoc) -> String {
    format!(
        "lambda,max_value,worst_x,worst_t,samples,pass\n{},{},{},{},{},{}\n",
        num(d.lambda),
        num(d.report.max_value),
        num(d.report.worst_x),
        num(d.report.worst_t),
        d.report.samples,
        d.report.pass
    )
}

pub fn green_table(d: &GreenDoc) -> String {
    format!(
        "lambda {}: max G = {:e} at (x, t) = ({}, {}) over {}^2 samples: {}\n",
        d.lambda,
        d.report.max_value,
        d.report.worst_x,
        d.report.worst_t,
        d.report.samples,
        if d.report.pass { "PASS" } else { "FAIL" }
    )
}

pub fn kernel_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::with_capacity(rows.len() * 72 + 8);
    s.push_str("x,t,G\n");
    for &(x, t, g) in rows {
        let _ = writeln!(s, "{},{},{}", num(x), num(t), num(g));
    }
    s
}

#[derive(Debug, Serialize)]
pub struct EigenDoc {
    pub m: f64,
    pub n: f64,
    pub a1: f64,
    pub a2: f64,
    #[serde(flatten)]
    pub result: EigenResult,
}

pub fn eigen_csv(d: &EigenDoc) -> String {
    format!(
        "m,n,a1,a2,lambda0,bracket_lo,bracket_hi,evaluations\n{},{},{},{},{},{},{},{}\n",
        num(d.m),
        num(d.n),
        num(d.a1),
        num(d.a2),
        num(d.result.lambda0),
        num(d.result.bracket.0),
        num(d.result.bracket.1),
        d.result.evaluations
    )
}

pub fn eigen_table(d: &EigenDoc) -> String {
    format!(
        "lambda0 = {} (bracket [{}, {}], {} evaluations)\n",
        d.result.lambda0, d.result.bracket.0, d.result.bracket.1, d.result.evaluations
    )
}

#[derive(Debug, Serialize)]
pub struct CatalogDoc {
    pub index: usize,
    pub label: String,
    pub m: f64,
    pub n: f64,
    #[serde(flatten)]
    pub boundary: BoundaryForm,
    pub f_expr: String,
    pub alpha0: String,
    pub beta0: String,
    #[serde(rename = "L_published")]
    pub l_published: f64,
    pub theorem: Theorem,
    pub exact_solution: Option<String>,
    pub region: String,
    pub source: String,
}

impl CatalogDoc {
    pub fn new(e: &CatalogEntry) -> Self {
        let p = &e.problem;
        CatalogDoc {
            index: e.index,
            label: p.label.clone(),
            m: p.m,
            n: p.n,
            boundary: p.boundary,
            f_expr: p.f_expr.clone().unwrap_or_default(),
            alpha0: e.alpha0_expr.into(),
            beta0: e.beta0_expr.into(),
            l_published: e.published_l,
            theorem: e.published_theorem,
            exact_solution: e.exact_expr.map(String::from),
            region: e.region(),
            source: e.source.into(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn catalog_csv(entries: &[CatalogDoc]) -> String {
    let mut s = String::from("index,label,m,n,a1,a2,C,f_expr,alpha0,beta0,L_published,theorem\n");
    for d in entries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            d.index,
            csv_field(&d.label),
            num(d.m),
            num(d.n),
            num(d.boundary.a1),
            num(d.boundary.a2),
            num(d.boundary.c),
            csv_field(&d.f_expr),
            csv_field(&d.alpha0),
            csv_field(&d.beta0),
            num(d.l_published),
            format!("{:?}", d.theorem).to_lowercase()
        );
    }
    s
}

/// `foo.csv` becomes `foo.summary.csv`; other names get `.summary.csv` appended.
pub fn summary_path(path: &Path) -> PathBuf {
    let s = path.to_string_lossy();
    match s.strip_suffix(".csv") {
        Some(stem) => PathBuf::from(format!("{stem}.summary.csv")),
        None => PathBuf::from(format!("{s}.summary.csv")),
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

/// Writes `iter,x,value` for every iterate and node to `path` and
/// `iter,delta_sup,monotone_violation` per step to [`summary_path`].
/// Iterate 0 is the starting function. Returns the summary path.
pub fn emit_trace_csv(trace: &IterationTrace, path: &Path) -> Result<PathBuf, CliError> {
    if trace.iterates.is_empty() {
        return Err(CliError::Input("empty iteration trace".into()));
    }
    let mut body = String::from("iter,x,value\n");
    for (i, it) in trace.iterates.iter().enumerate() {
        for (x, v) in it.nodes.iter().zip(&it.values) {
            let _ = writeln!(body, "{i},{},{}", num(*x), num(*v));
        }
    }
    write_file(path, &body)?;
    let mut summary = String::from("iter,delta_sup,monotone_violation\n");
    for (i, (d, v)) in trace.deltas.iter().zip(&trace.step_violations).enumerate() {
        let _ = writeln!(summary, "{},{},{}", i + 1, num(*d), num(*v));
    }
    let sp = summary_path(path);
    write_file(&sp, &summary)?;
    Ok(sp)
}

/// Rows of a trace CSV written by [`emit_trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<(usize, f64, f64)>, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some("iter,x,value") {
        return Err(CliError::Input("trace CSV header must be `iter,x,value`".into()));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let bad = || CliError::Input(format!("malformed trace row {}: `{line}`", k + 2));
            let mut f = line.split(',');
            let (Some(i), Some(x), Some(v), None) = (f.next(), f.next(), f.next(), f.next()) else {
                return Err(bad());
            };
            Ok((i.parse().map_err(|_| bad())?, x.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?))
        })
        .collect()
}
