//! Upper/lower solution checks and the monotone iteration
//! `-s_{i+1}'' - n s_{i+1}' - (m/x) s_{i+1}' - λ s_{i+1} = f(x, s_i) - λ s_i`.

use serde::Serialize;

use crate::eigen::principal_eigenvalue;
use crate::error::{BvpError, Result};
use crate::greens::{build_fundamental_pair, FundamentalPair};
use crate::linsolve::{
    fourth_order_operator, nonlinear_residual, solve_linear_fdm, solve_linear_green, LinearBVP,
};
use crate::model::{GridSpec, MeshFunction, ProblemSpec};

/// Slack allowed on the defining inequalities of upper and lower solutions.
pub const TOL_VERIFY: f64 = 1e-6;
/// Bound on the nonlinear residual of the limits for a passing certificate.
pub const TOL_RESIDUAL: f64 = 1e-6;
/// Pointwise ordering slack `α ≤ β + 1e-8`.
pub const TOL_ORDER: f64 = 1e-8;
/// Wrong-direction increments allowed, relative to `max(1, ‖s_0‖∞)`.
pub const TOL_MONOTONE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Upper,
    Lower,
}

/// Slack of the upper or lower solution inequalities, oriented so that
/// non-negative numbers (and a small `boundary_margin_0`) mean success.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: SolutionKind,
    pub interior_margin: f64,
    /// Node where the interior margin is attained.
    pub worst_x: f64,
    /// `|s'(0)|`.
    pub boundary_margin_0: f64,
    /// `a1 s(1) + a2 s'(1) - C` for upper solutions, its negative for lower.
    pub boundary_margin_1: f64,
    pub pass: bool,
}

fn verify(p: &ProblemSpec, s: &MeshFunction, kind: SolutionKind) -> Result<VerificationReport> {
    let nodes = &s.nodes;
    let count = nodes.len();
    if count < 9 {
        return Err(BvpError::InvalidGrid(format!("verification needs at least 9 nodes, got {count}")));
    }
    let sign = match kind {
        SolutionKind::Upper => 1.0,
        SolutionKind::Lower => -1.0,
    };
    let (op, d_at_0, d_at_1) = fourth_order_operator(p.m, p.n, nodes, &s.values);
    let mut margin = f64::INFINITY;
    let mut worst_x = 0.0;
    for (i, lhs) in op.into_iter().enumerate() {
        let x = nodes[i];
        let slack = sign * (lhs - p.eval_f(x, s.values[i])?);
        if slack < margin {
            margin = slack;
            worst_x = x;
        }
    }
    let bm1 = sign * (p.boundary.apply(s.at_one(), d_at_1) - p.boundary.c);
    let bm0 = d_at_0.abs();
    let pass = margin >= -TOL_VERIFY && bm0 <= TOL_VERIFY && bm1 >= -TOL_VERIFY;
    Ok(VerificationReport { kind, interior_margin: margin, worst_x, boundary_margin_0: bm0, boundary_margin_1: bm1, pass })
}

/// Checks `-β'' - nβ' - (m/x)β' ≥ f(x, β)`, `β'(0) = 0`,
/// `a1 β(1) + a2 β'(1) ≥ C`, with fourth-order difference derivatives.
pub fn verify_upper(p: &ProblemSpec, beta0: &MeshFunction) -> Result<VerificationReport> {
    verify(p, beta0, SolutionKind::Upper)
}

/// Mirror of [`verify_upper`] with the inequalities reversed.
pub fn verify_lower(p: &ProblemSpec, alpha0: &MeshFunction) -> Result<VerificationReport> {
    verify(p, alpha0, SolutionKind::Lower)
}

/// Extremes of `∂f/∂s` over the region between two mesh functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeBounds {
    pub inf_slope: f64,
    pub sup_slope: f64,
}

impl SlopeBounds {
    /// Smallest `L ≥ 0` with `f(x,w1) - f(x,w2) ≥ -L (w1 - w2)` on the samples.
    pub fn one_sided_l(&self) -> f64 {
        (-self.inf_slope).max(0.0)
    }
}

/// Samples `∂f/∂s` at every node and `samples` levels between `s_lo` and
/// `s_hi` (endpoints included).
pub fn slope_bounds(p: &ProblemSpec, s_lo: &MeshFunction, s_hi: &MeshFunction, samples: usize) -> Result<SlopeBounds> {
    if !s_lo.same_grid(s_hi) {
        return Err(BvpError::ParameterMismatch("bracket functions use different grids".into()));
    }
    let levels = samples.max(2);
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    for (i, &x) in s_lo.nodes.iter().enumerate() {
        let (lo, hi) = (s_lo.values[i], s_hi.values[i]);
        if lo > hi + TOL_ORDER {
            return Err(BvpError::ParameterMismatch(format!("lower function above upper at x = {x}")));
        }
        for k in 0..levels {
            let s = lo + (hi - lo) * k as f64 / (levels - 1) as f64;
            let slope = match &p.df_ds {
                Some(df) => df(x, s),
                None => {
                    let step = 1e-6 * (1.0 + s.abs());
                    (p.eval_f(x, s + step)? - p.eval_f(x, s - step)?) / (2.0 * step)
                }
            };
            if !slope.is_finite() {
                return Err(BvpError::EvaluationFailed { x, s: Some(s) });
            }
            inf = inf.min(slope);
            sup = sup.max(slope);
        }
    }
    Ok(SlopeBounds { inf_slope: inf, sup_slope: sup })
}

/// `max(0, -inf ∂f/∂s)` over the sampled region.
pub fn lipschitz_estimate(p: &ProblemSpec, s_lo: &MeshFunction, s_hi: &MeshFunction, samples: usize) -> Result<f64> {
    Ok(slope_bounds(p, s_lo, s_hi, samples)?.one_sided_l())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Thm1,
    Thm2,
}

/// Shift policy for [`choose_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftPolicy {
    /// Extra room below `-L` under thm1.
    pub thm1_margin: f64,
    /// Shift used under thm1 when `L = 0`.
    pub zero_l_shift: f64,
    /// Fraction of `λ₀` never exceeded under thm2.
    pub eigen_fraction: f64,
}

impl Default for ShiftPolicy {
    fn default() -> Self {
        ShiftPolicy { thm1_margin: 0.0, zero_l_shift: 0.5, eigen_fraction: 0.9 }
    }
}

/// thm1: `λ = -L - margin` (falling back to `-zero_l_shift` when that is 0);
/// thm2: `λ = min(L, 0.9 λ₀)` where `L` is the lower slope bound.
pub fn choose_lambda(theorem: Theorem, l: f64, lambda0: Option<f64>) -> Result<f64> {
    choose_lambda_with(theorem, l, lambda0, &ShiftPolicy::default())
}

pub fn choose_lambda_with(theorem: Theorem, l: f64, lambda0: Option<f64>, policy: &ShiftPolicy) -> Result<f64> {
    if !l.is_finite() {
        return Err(BvpError::NonFinite("L"));
    }
    match theorem {
        Theorem::Thm1 => {
            let lambda = -l - policy.thm1_margin;
            Ok(if lambda == 0.0 { -policy.zero_l_shift } else { lambda })
        }
        Theorem::Thm2 => {
            let Some(l0) = lambda0 else {
                return Err(BvpError::NoAdmissibleShift("thm2 needs the principal eigenvalue".into()));
            };
            let lambda = l.min(policy.eigen_fraction * l0);
            if !(lambda > 0.0) {
                return Err(BvpError::NoAdmissibleShift(format!("min(L = {l}, {} λ₀ = {}) <= 0", policy.eigen_fraction, policy.eigen_fraction * l0)));
            }
            Ok(lambda)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Green,
    Fdm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationSettings {
    pub lambda: f64,
    pub max_iters: usize,
    pub tol_sup: f64,
    pub grid: GridSpec,
    pub backend: Backend,
}

impl IterationSettings {
    pub fn new(lambda: f64, grid: GridSpec, backend: Backend) -> Self {
        IterationSettings { lambda, max_iters: 500, tol_sup: 1e-12, grid, backend }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0.0 {
            return Err(BvpError::ShiftZeroError);
        }
        if !self.lambda.is_finite() {
            return Err(BvpError::NonFinite("lambda"));
        }
        if !(self.tol_sup >= 1e-12) {
            return Err(BvpError::DomainError { func: "iterate", detail: format!("tol_sup = {} (require >= 1e-12)", self.tol_sup) });
        }
        if self.max_iters == 0 {
            return Err(BvpError::DomainError { func: "iterate", detail: "max_iters must be positive".into() });
        }
        self.grid.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    FromUpper,
    FromLower,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub direction: Direction,
    /// `s_0, s_1, …`; the first entry is the starting function.
    pub iterates: Vec<MeshFunction>,
    /// `deltas[i] = ‖s_{i+1} - s_i‖∞`.
    pub deltas: Vec<f64>,
    /// Per step, the worst increment against the expected direction (≥ 0).
    pub step_violations: Vec<f64>,
    pub monotone_violation: f64,
    pub converged: bool,
}

impl IterationTrace {
    pub fn last(&self) -> &MeshFunction {
        self.iterates.last().expect("trace holds the starting function")
    }
}

/// Linear solver shared across the iterations of both sequences.
enum LinearSolver {
    Green(Box<FundamentalPair>),
    Fdm(GridSpec),
}

impl LinearSolver {
    fn new(p: &ProblemSpec, settings: &IterationSettings) -> Result<Self> {
        Ok(match settings.backend {
            Backend::Green => LinearSolver::Green(Box::new(build_fundamental_pair(p, settings.lambda, &settings.grid)?)),
            Backend::Fdm => LinearSolver::Fdm(settings.grid),
        })
    }

    fn solve(&self, lb: &LinearBVP) -> Result<MeshFunction> {
        match self {
            LinearSolver::Green(fp) => solve_linear_green(lb, fp),
            LinearSolver::Fdm(g) => solve_linear_fdm(lb, g),
        }
    }
}

fn check_shift_below_eigenvalue(p: &ProblemSpec, lambda: f64) -> Result<Option<f64>> {
    if lambda <= 0.0 {
        return Ok(None);
    }
    let l0 = principal_eigenvalue(p.m, p.n, &p.boundary, 1e-10)?.lambda0;
    if lambda >= l0 {
        return Err(BvpError::NoAdmissibleShift(format!("lambda = {lambda} is not below the principal eigenvalue {l0}")));
    }
    Ok(Some(l0))
}

/// Runs the monotone scheme from `initial` until `‖s_{i+1} - s_i‖∞ ≤ tol_sup`
/// or `max_iters` steps.
pub fn iterate(p: &ProblemSpec, initial: &MeshFunction, settings: &IterationSettings, direction: Direction) -> Result<IterationTrace> {
    settings.validate()?;
    check_shift_below_eigenvalue(p, settings.lambda)?;
    let solver = LinearSolver::new(p, settings)?;
    run_iteration(p, initial, settings, direction, &solver)
}

fn run_iteration(
    p: &ProblemSpec,
    initial: &MeshFunction,
    settings: &IterationSettings,
    direction: Direction,
    solver: &LinearSolver,
) -> Result<IterationTrace> {
    let nodes = settings.grid.nodes()?;
    if initial.nodes[..] != nodes[..] {
        return Err(BvpError::ParameterMismatch("initial function lives on a different grid".into()));
    }
    let lambda = settings.lambda;
    let mut trace = IterationTrace {
        direction,
        iterates: vec![initial.clone()],
        deltas: Vec::new(),
        step_violations: Vec::new(),
        monotone_violation: 0.0,
        converged: false,
    };
    for it in 0..settings.max_iters {
        let cur = trace.last();
        let mut h = Vec::with_capacity(cur.len());
        for (&x, &s) in cur.nodes.iter().zip(&cur.values) {
            h.push(p.eval_f(x, s)? - lambda * s);
        }
        let lb = LinearBVP {
            m: p.m,
            n: p.n,
            lambda,
            h: MeshFunction::from_values(cur.nodes.clone(), h)?,
            boundary: p.boundary,
        };
        let next = solver.solve(&lb)?;
        let mut delta: f64 = 0.0;
        let mut wrong: f64 = 0.0;
        for (a, b) in cur.values.iter().zip(&next.values) {
            delta = delta.max((b - a).abs());
            let step = match direction {
                Direction::FromUpper => b - a,
                Direction::FromLower => a - b,
            };
            wrong = wrong.max(step);
        }
        trace.deltas.push(delta);
        trace.step_violations.push(wrong);
        trace.monotone_violation = trace.monotone_violation.max(wrong);
        trace.iterates.push(next);
        if delta <= settings.tol_sup {
            trace.converged = true;
            break;
        }
        let k = trace.deltas.len();
        if k > 5 {
            let window = &trace.deltas[k - 6..];
            if window.windows(2).all(|w| w[1] > w[0]) && window[5] > 10.0 * window[0] {
                return Err(BvpError::DivergenceError { iteration: it + 1, delta });
            }
        }
        if !delta.is_finite() {
            return Err(BvpError::DivergenceError { iteration: it + 1, delta });
        }
    }
    Ok(trace)
}

/// Settings of a full existence run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSettings {
    pub grid: GridSpec,
    pub backend: Backend,
    pub max_iters: usize,
    pub tol_sup: f64,
    /// Replaces the automatic shift; still required to stay below `λ₀`.
    pub lambda_override: Option<f64>,
    pub policy: ShiftPolicy,
    /// Levels of `s` per node in the slope sampling.
    pub slope_samples: usize,
    /// Run the two sequences on separate threads.
    pub parallel: bool,
}

impl RegionSettings {
    pub fn new(grid: GridSpec) -> Self {
        RegionSettings {
            grid,
            backend: Backend::Fdm,
            max_iters: 500,
            tol_sup: 1e-12,
            lambda_override: None,
            policy: ShiftPolicy::default(),
            slope_samples: 33,
            parallel: false,
        }
    }
}

/// Everything a reader needs to re-check an existence claim.
#[derive(Debug, Clone)]
pub struct ExistenceCertificate {
    pub problem: ProblemSpec,
    pub upper_report: Option<VerificationReport>,
    pub lower_report: Option<VerificationReport>,
    pub slopes: Option<SlopeBounds>,
    pub theorem: Option<Theorem>,
    pub lambda_used: Option<f64>,
    /// One-sided Lipschitz constant found by sampling.
    pub l_used: Option<f64>,
    /// Constant supplied with the problem, if any.
    pub l_published: Option<f64>,
    pub lambda0: Option<f64>,
    pub upper_trace: Option<IterationTrace>,
    pub lower_trace: Option<IterationTrace>,
    pub beta_limit: Option<MeshFunction>,
    pub alpha_limit: Option<MeshFunction>,
    pub bracket_gap: Option<f64>,
    pub residual_sup: Option<f64>,
    /// Worst `α_i - β_i` over common indices and the limits.
    pub ordering_violation: Option<f64>,
    pub grid: GridSpec,
    pub backend: Backend,
    /// First error met, as `(kind, message)`.
    pub failure: Option<(String, String)>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl ExistenceCertificate {
    fn empty(p: &ProblemSpec, settings: &RegionSettings) -> Self {
        ExistenceCertificate {
            problem: p.clone(),
            upper_report: None,
            lower_report: None,
            slopes: None,
            theorem: None,
            lambda_used: None,
            l_used: None,
            l_published: p.lipschitz_l,
            lambda0: None,
            upper_trace: None,
            lower_trace: None,
            beta_limit: None,
            alpha_limit: None,
            bracket_gap: None,
            residual_sup: None,
            ordering_violation: None,
            grid: settings.grid,
            backend: settings.backend,
            failure: None,
            notes: Vec::new(),
            pass: false,
        }
    }
}

/// Verifies `α₀`, `β₀`, picks the shift, runs both sequences and assembles
/// the certificate. Errors never escape; they are recorded with
/// `pass = false`.
pub fn solve_region(p: &ProblemSpec, alpha0: &MeshFunction, beta0: &MeshFunction, settings: &RegionSettings) -> ExistenceCertificate {
    let mut cert = ExistenceCertificate::empty(p, settings);
    if let Err(e) = fill_certificate(&mut cert, p, alpha0, beta0, settings) {
        cert.failure = Some((e.kind().to_string(), e.to_string()));
        cert.pass = false;
    }
    cert
}

fn fill_certificate(
    cert: &mut ExistenceCertificate,
    p: &ProblemSpec,
    alpha0: &MeshFunction,
    beta0: &MeshFunction,
    settings: &RegionSettings,
) -> Result<()> {
    let nodes = settings.grid.nodes()?;
    if alpha0.nodes[..] != nodes[..] || beta0.nodes[..] != nodes[..] {
        return Err(BvpError::ParameterMismatch("starting functions do not live on the run grid".into()));
    }
    let lower = verify_lower(p, alpha0)?;
    let upper = verify_upper(p, beta0)?;
    cert.lower_report = Some(lower);
    cert.upper_report = Some(upper);
    if !(lower.pass && upper.pass) {
        cert.notes.push("starting functions fail verification; iteration skipped".into());
        return Ok(());
    }

    let slopes = slope_bounds(p, alpha0, beta0, settings.slope_samples)?;
    cert.slopes = Some(slopes);
    cert.l_used = Some(slopes.one_sided_l());
    let theorem = if slopes.inf_slope < 0.0 { Theorem::Thm1 } else { Theorem::Thm2 };
    cert.theorem = Some(theorem);
    cert.lambda0 = principal_eigenvalue(p.m, p.n, &p.boundary, 1e-10).ok().map(|r| r.lambda0);
    let lambda = match settings.lambda_override {
        Some(l) => {
            cert.notes.push(format!("shift overridden to {l}"));
            l
        }
        None => {
            let l = match theorem {
                Theorem::Thm1 => slopes.one_sided_l(),
                Theorem::Thm2 => slopes.inf_slope,
            };
            choose_lambda_with(theorem, l, cert.lambda0, &settings.policy)?
        }
    };
    if lambda > 0.0 {
        match cert.lambda0 {
            Some(l0) if lambda < l0 => {}
            Some(l0) => {
                return Err(BvpError::NoAdmissibleShift(format!("lambda = {lambda} is not below the principal eigenvalue {l0}")));
            }
            None => return Err(BvpError::NoAdmissibleShift("positive shift without a principal eigenvalue".into())),
        }
    }
    cert.lambda_used = Some(lambda);

    let it = IterationSettings { lambda, max_iters: settings.max_iters, tol_sup: settings.tol_sup, grid: settings.grid, backend: settings.backend };
    it.validate()?;
    let solver = LinearSolver::new(p, &it)?;
    let (up, lo) = if settings.parallel {
        std::thread::scope(|scope| {
            let up = scope.spawn(|| run_iteration(p, beta0, &it, Direction::FromUpper, &solver));
            let lo = run_iteration(p, alpha0, &it, Direction::FromLower, &solver);
            (up.join().expect("iteration thread panicked"), lo)
        })
    } else {
        (
            run_iteration(p, beta0, &it, Direction::FromUpper, &solver),
            run_iteration(p, alpha0, &it, Direction::FromLower, &solver),
        )
    };
    let (up, lo) = (up?, lo?);

    let beta = up.last().clone();
    let alpha = lo.last().clone();
    let mut order: f64 = f64::NEG_INFINITY;
    for (a, b) in up.iterates.iter().zip(&lo.iterates).map(|(b, a)| (a, b)) {
        for (x, y) in a.values.iter().zip(&b.values) {
            order = order.max(x - y);
        }
    }
    for (x, y) in alpha.values.iter().zip(&beta.values) {
        order = order.max(x - y);
    }
    let residual = nonlinear_residual(p, &beta)?.sup().max(nonlinear_residual(p, &alpha)?.sup());
    cert.bracket_gap = Some(beta.sup_distance(&alpha));
    cert.residual_sup = Some(residual);
    cert.ordering_violation = Some(order);

    let upper_ok = up.converged && up.monotone_violation <= TOL_MONOTONE * beta0.sup_norm().max(1.0);
    let lower_ok = lo.converged && lo.monotone_violation <= TOL_MONOTONE * alpha0.sup_norm().max(1.0);
    if !up.converged || !lo.converged {
        cert.notes.push("iteration hit max_iters before tol_sup".into());
    }
    if !(upper_ok && lower_ok) && up.converged && lo.converged {
        cert.notes.push("monotonicity violated beyond tolerance".into());
    }
    if order > TOL_ORDER {
        cert.notes.push(format!("ordering violated by {order:e}"));
    }
    if residual > TOL_RESIDUAL {
        cert.notes.push(format!("limit residual {residual:e} exceeds {TOL_RESIDUAL:e}"));
    }
    cert.pass = upper_ok && lower_ok && order <= TOL_ORDER && residual <= TOL_RESIDUAL;
    cert.beta_limit = Some(beta);
    cert.alpha_limit = Some(alpha);
    cert.upper_trace = Some(up);
    cert.lower_trace = Some(lo);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_on_grid, BoundaryForm};

    fn thermal_problem() -> ProblemSpec {
        ProblemSpec::from_expr("e3", 1.0, 0.0, BoundaryForm::dirichlet(0.0), "exp(s)/4").unwrap()
    }

    #[test]
    fn upper_margin_example() {
        let g = GridSpec::uniform(1001);
        let beta = eval_on_grid(&g, |x| (3.0 - x * x) / 4.0).unwrap();
        let r = verify_upper(&thermal_problem(), &beta).unwrap();
        assert!(r.pass);
        assert!((r.interior_margin - (1.0 - 0.75f64.exp() / 4.0)).abs() < 1e-8);
        let zero = eval_on_grid(&g, |_| 0.0).unwrap();
        let r = verify_upper(&thermal_problem(), &zero).unwrap();
        assert!(!r.pass && (r.interior_margin + 0.25).abs() < 1e-12);
    }

    #[test]
    fn lower_examples() {
        let g = GridSpec::uniform(1001);
        let r = verify_lower(&thermal_problem(), &eval_on_grid(&g, |_| 0.0).unwrap()).unwrap();
        assert!(r.pass && (r.interior_margin - 0.25).abs() < 1e-12);
        let r = verify_lower(&thermal_problem(), &eval_on_grid(&g, |_| 10.0).unwrap()).unwrap();
        assert!(!r.pass && r.boundary_margin_1 < 0.0);
    }

    #[test]
    fn shift_choices() {
        let e = std::f64::consts::E;
        assert_eq!(choose_lambda(Theorem::Thm1, 2.0 * e, None).unwrap(), -2.0 * e);
        assert_eq!(choose_lambda(Theorem::Thm1, 0.0, None).unwrap(), -0.5);
        assert_eq!(choose_lambda(Theorem::Thm2, 0.75, Some(30.0)).unwrap(), 0.75);
        assert_eq!(choose_lambda(Theorem::Thm2, 5.0, Some(2.0)).unwrap(), 0.9 * 2.0);
        assert_eq!(choose_lambda(Theorem::Thm2, 0.0, Some(2.0)).unwrap_err().kind(), "NoAdmissibleShift");
        assert_eq!(choose_lambda(Theorem::Thm2, 1.0, None).unwrap_err().kind(), "NoAdmissibleShift");
    }

    #[test]
    fn slope_bounds_examples() {
        let g = GridSpec::uniform(65);
        let p = ProblemSpec::from_expr("e1", 1.0, 1.0, BoundaryForm::new(1.0, 1.0, 1.0), "1 - 2*exp(s)").unwrap();
        let lo = eval_on_grid(&g, |_| -1.0).unwrap();
        let hi = eval_on_grid(&g, |_| 1.0).unwrap();
        let l = lipschitz_estimate(&p, &lo, &hi, 11).unwrap();
        assert!((l - 2.0 * std::f64::consts::E).abs() < 1e-12);
        let p = ProblemSpec::new("lin", 5.0, 10.0, BoundaryForm::new(6.0, 1.0, 1.0), |_, s| 0.75 * s);
        let b = slope_bounds(&p, &lo, &hi, 11).unwrap();
        assert!((b.inf_slope - 0.75).abs() < 1e-8 && (b.sup_slope - 0.75).abs() < 1e-8);
    }

    #[test]
    fn settings_validation() {
        let g = GridSpec::uniform(9);
        assert!(IterationSettings::new(0.0, g, Backend::Fdm).validate().is_err());
        let mut s = IterationSettings::new(-1.0, g, Backend::Fdm);
        s.tol_sup = 1e-13;
        assert!(s.validate().is_err());
    }
}
