//! Problem definitions, grids and mesh functions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{BvpError, Result};
use crate::expr::{Expr, Var};
use crate::stencil;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Robin data `a1 s(1) + a2 s'(1) = C` at the right end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryForm {
    pub a1: f64,
    pub a2: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl BoundaryForm {
    pub fn new(a1: f64, a2: f64, c: f64) -> Self {
        BoundaryForm { a1, a2, c }
    }

    pub fn dirichlet(c: f64) -> Self {
        BoundaryForm { a1: 1.0, a2: 0.0, c }
    }

    /// Same weights with homogeneous data.
    pub fn homogeneous(self) -> Self {
        BoundaryForm { c: 0.0, ..self }
    }

    pub fn apply(&self, value: f64, slope: f64) -> f64 {
        self.a1 * value + self.a2 * slope
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a1.is_finite() && self.a2.is_finite()) {
            return Err(BvpError::NonFinite("boundary"));
        }
        if !self.c.is_finite() {
            return Err(BvpError::NonFinite("C"));
        }
        if self.a1 <= 0.0 {
            return Err(BvpError::InvalidBoundary(format!("a1 must be positive, got {}", self.a1)));
        }
        if self.a2 < 0.0 {
            return Err(BvpError::InvalidBoundary(format!("a2 must be non-negative, got {}", self.a2)));
        }
        Ok(())
    }
}

/// The nonlinear problem `-s'' - n s' - (m/x) s' = f(x, s)`, `s'(0) = 0`,
/// `a1 s(1) + a2 s'(1) = C`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub m: f64,
    pub n: f64,
    pub boundary: BoundaryForm,
    pub f: SourceFn,
    pub df_ds: Option<SourceFn>,
    /// Known one-sided Lipschitz constant, if any.
    pub lipschitz_l: Option<f64>,
    pub label: String,
    /// Source text of `f` when it came from the expression grammar.
    pub f_expr: Option<String>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("label", &self.label)
            .field("m", &self.m)
            .field("n", &self.n)
            .field("boundary", &self.boundary)
            .field("f_expr", &self.f_expr)
            .field("df_ds", &self.df_ds.is_some())
            .field("lipschitz_l", &self.lipschitz_l)
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(
        label: impl Into<String>,
        m: f64,
        n: f64,
        boundary: BoundaryForm,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProblemSpec {
            m,
            n,
            boundary,
            f: Arc::new(f),
            df_ds: None,
            lipschitz_l: None,
            label: label.into(),
            f_expr: None,
        }
    }

    /// Builds the problem from an expression for `f`; `df/ds` is derived
    /// symbolically.
    pub fn from_expr(label: impl Into<String>, m: f64, n: f64, boundary: BoundaryForm, f_expr: &str) -> Result<Self> {
        let e = Expr::parse(f_expr)?;
        let d = e.derivative(Var::S);
        Ok(ProblemSpec {
            m,
            n,
            boundary,
            f: Arc::new(move |x, s| e.eval(x, s)),
            df_ds: Some(Arc::new(move |x, s| d.eval(x, s))),
            lipschitz_l: None,
            label: label.into(),
            f_expr: Some(f_expr.to_string()),
        })
    }

    pub fn with_df_ds(mut self, df: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.df_ds = Some(Arc::new(df));
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz_l = Some(l);
        self
    }

    pub fn eval_f(&self, x: f64, s: f64) -> Result<f64> {
        let v = (self.f)(x, s);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(BvpError::EvaluationFailed { x, s: Some(s) })
        }
    }
}

/// Checks the structural invariants of a problem and hands it back.
pub fn validate_problem(p: ProblemSpec) -> Result<ProblemSpec> {
    if !p.m.is_finite() {
        return Err(BvpError::NonFinite("m"));
    }
    if p.m <= 0.0 {
        return Err(BvpError::SingularityStrengthNonpositive(p.m));
    }
    if !p.n.is_finite() {
        return Err(BvpError::NonFinite("n"));
    }
    p.boundary.validate()?;
    if let Some(l) = p.lipschitz_l {
        if !l.is_finite() || l < 0.0 {
            return Err(BvpError::NonFinite("lipschitz_L"));
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    #[serde(rename = "graded_toward_0")]
    GradedToward0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub node_count: usize,
    pub grading: Grading,
    pub grading_exponent: f64,
}

impl GridSpec {
    pub fn uniform(node_count: usize) -> Self {
        GridSpec { node_count, grading: Grading::Uniform, grading_exponent: 1.0 }
    }

    pub fn graded(node_count: usize, exponent: f64) -> Self {
        GridSpec { node_count, grading: Grading::GradedToward0, grading_exponent: exponent }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 9 || self.node_count.is_multiple_of(2) {
            return Err(BvpError::InvalidGrid(format!(
                "node_count must be odd and at least 9, got {}",
                self.node_count
            )));
        }
        if !(self.grading_exponent >= 1.0) || !self.grading_exponent.is_finite() {
            return Err(BvpError::InvalidGrid(format!(
                "grading exponent must be >= 1, got {}",
                self.grading_exponent
            )));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Result<Arc<[f64]>> {
        self.validate()?;
        let last = (self.node_count - 1) as f64;
        let p = match self.grading {
            Grading::Uniform => 1.0,
            Grading::GradedToward0 => self.grading_exponent,
        };
        let nodes: Vec<f64> = (0..self.node_count)
            .map(|i| {
                let r = i as f64 / last;
                if p == 1.0 {
                    r
                } else {
                    r.powf(p)
                }
            })
            .collect();
        Ok(nodes.into())
    }
}

/// Values of a function on a fixed grid over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshFunction {
    pub nodes: Arc<[f64]>,
    pub values: Vec<f64>,
    /// Estimate of `s'(0)`.
    pub d_at_0: f64,
    /// Estimate of `s'(1)`.
    pub d_at_1: f64,
}

impl MeshFunction {
    /// Builds a mesh function; end derivatives from one-sided 3-point
    /// differences.
    pub fn from_values(nodes: Arc<[f64]>, values: Vec<f64>) -> Result<Self> {
        check_nodes(&nodes)?;
        if values.len() != nodes.len() {
            return Err(BvpError::ParameterMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                nodes.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(BvpError::EvaluationFailed { x: nodes[i], s: None });
        }
        let d_at_0 = stencil::three_point_end_derivative(&nodes, &values, true);
        let d_at_1 = stencil::three_point_end_derivative(&nodes, &values, false);
        Ok(MeshFunction { nodes, values, d_at_0, d_at_1 })
    }

    pub fn with_end_derivatives(mut self, d_at_0: f64, d_at_1: f64) -> Self {
        self.d_at_0 = d_at_0;
        self.d_at_1 = d_at_1;
        self
    }

    pub fn zeros(nodes: Arc<[f64]>) -> Self {
        let n = nodes.len();
        MeshFunction { nodes, values: vec![0.0; n], d_at_0: 0.0, d_at_1: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at_one(&self) -> f64 {
        *self.values.last().expect("mesh function is never empty")
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn same_grid(&self, other: &MeshFunction) -> bool {
        Arc::ptr_eq(&self.nodes, &other.nodes) || self.nodes[..] == other.nodes[..]
    }

    /// `sup |self - other|`.
    pub fn sup_distance(&self, other: &MeshFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (p, q)| a.max((p - q).abs()))
    }

    /// Node spacing bound `max Δx`.
    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).fold(0.0, |a, w| a.max(w[1] - w[0]))
    }
}

fn check_nodes(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 3 {
        return Err(BvpError::InvalidGrid("at least 3 nodes required".into()));
    }
    if nodes[0] != 0.0 || nodes[nodes.len() - 1] != 1.0 {
        return Err(BvpError::InvalidGrid("grid must start at 0 and end at 1".into()));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(BvpError::InvalidGrid("nodes must be strictly increasing".into()));
    }
    Ok(())
}

/// Samples `phi` at the nodes of `g`.
pub fn eval_on_grid(g: &GridSpec, phi: impl Fn(f64) -> f64) -> Result<MeshFunction> {
    let nodes = g.nodes()?;
    eval_on_nodes(nodes, phi)
}

pub fn eval_on_nodes(nodes: Arc<[f64]>, phi: impl Fn(f64) -> f64) -> Result<MeshFunction> {
    let mut values = Vec::with_capacity(nodes.len());
    for &x in nodes.iter() {
        let v = phi(x);
        if !v.is_finite() {
            return Err(BvpError::EvaluationFailed { x, s: None });
        }
        values.push(v);
    }
    MeshFunction::from_values(nodes, values)
}

/// A problem as read from the flat key-value text format, together with the
/// optional upper and lower solution expressions.
#[derive(Debug, Clone)]
pub struct ProblemDefinition {
    pub problem: ProblemSpec,
    pub alpha0_expr: Option<String>,
    pub beta0_expr: Option<String>,
}

const KNOWN_KEYS: [&str; 10] = ["label", "m", "n", "a1", "a2", "C", "f_expr", "alpha0", "beta0", "L"];

/// Parses `key = value` lines. Numeric keys accept constant expressions
/// such as `sqrt(3/4)`; `#` starts a comment.
pub fn parse_problem_text(text: &str) -> Result<ProblemDefinition> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| BvpError::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = k.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(BvpError::Parse(format!("line {}: unknown key `{key}`", lineno + 1)));
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(BvpError::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
        entries.push((key, v.trim().to_string()));
    }
    let get = |k: &str| entries.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    let number = |k: &str, default: Option<f64>| -> Result<f64> {
        match get(k) {
            Some(v) => Expr::parse(&v)?
                .constant_value()
                .ok_or_else(|| BvpError::Parse(format!("`{k}` must be a constant"))),
            None => default.ok_or_else(|| BvpError::Parse(format!("missing key `{k}`"))),
        }
    };
    let m = number("m", None)?;
    let n = number("n", Some(0.0))?;
    let a1 = number("a1", None)?;
    let a2 = number("a2", Some(0.0))?;
    let c = number("C", Some(0.0))?;
    let f_expr = get("f_expr").ok_or_else(|| BvpError::Parse("missing key `f_expr`".into()))?;
    let label = get("label").unwrap_or_else(|| "user problem".into());
    let mut problem = ProblemSpec::from_expr(label, m, n, BoundaryForm::new(a1, a2, c), &f_expr)?;
    if get("L").is_some() {
        problem.lipschitz_l = Some(number("L", None)?);
    }
    for key in ["alpha0", "beta0"] {
        if let Some(src) = get(key) {
            if Expr::parse(&src)?.uses(Var::S) {
                return Err(BvpError::Parse(format!("`{key}` must depend on x only")));
            }
        }
    }
    Ok(ProblemDefinition { problem: validate_problem(problem)?, alpha0_expr: get("alpha0"), beta0_expr: get("beta0") })
}

/// Inverse of [`parse_problem_text`]; numbers are written in shortest
/// round-trip form.
pub fn problem_to_text(def: &ProblemDefinition) -> Result<String> {
    let p = &def.problem;
    let f_expr = p
        .f_expr
        .as_ref()
        .ok_or_else(|| BvpError::Parse("problem has no source expression".into()))?;
    let mut out = String::new();
    out.push_str(&format!("label = {}\n", p.label));
    out.push_str(&format!("m = {:?}\n", p.m));
    out.push_str(&format!("n = {:?}\n", p.n));
    out.push_str(&format!("a1 = {:?}\n", p.boundary.a1));
    out.push_str(&format!("a2 = {:?}\n", p.boundary.a2));
    out.push_str(&format!("C = {:?}\n", p.boundary.c));
    out.push_str(&format!("f_expr = {f_expr}\n"));
    if let Some(a) = &def.alpha0_expr {
        out.push_str(&format!("alpha0 = {a}\n"));
    }
    if let Some(b) = &def.beta0_expr {
        out.push_str(&format!("beta0 = {b}\n"));
    }
    if let Some(l) = p.lipschitz_l {
        out.push_str(&format!("L = {l:?}\n"));
    }
    Ok(out)
}

/// Compiles an expression in `x` into a closure.
pub fn compile_x_expr(src: &str) -> Result<ScalarFn> {
    let e = Expr::parse(src)?;
    if e.uses(Var::S) {
        return Err(BvpError::Parse(format!("`{src}` must depend on x only")));
    }
    Ok(Arc::new(move |x| e.eval(x, 0.0)))
}
