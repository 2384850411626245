//! Fundamental solutions of the shifted operator
//! `L_λ s = -s'' - n s' - (m/x) s' - λ s`, its Green's kernel, and the kernel
//! applied as an integral operator on a grid.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{BvpError, Result};
use crate::model::{BoundaryForm, GridSpec, MeshFunction, ProblemSpec};
use crate::ode::{dopri5, DenseSolution, Dopri5Options};
use crate::quad::gl16;
use crate::specfun::{kummer_m, regular_series_eval, SeriesSolutionParams, KUMMER_MAX_ABS_Z};

/// Backward integration of `v` runs to `V_STOP_FACTOR · min(x_1, 0.005)`,
/// where the two-term fit `A + B φ(t)` is accurate to O(t²).
const V_STOP_CEILING: f64 = 0.005;
const V_STOP_FACTOR: f64 = 1e-3;
/// Required agreement between the closed-form and series regular solutions.
const CROSS_CHECK_TOL: f64 = 1e-7;
const GL_POINTS: usize = 16;
const FIRST_PANEL_LEVELS: i32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMethod {
    ClosedFormCase1,
    SeriesPlusIntegration,
}

/// The regular solution `u` with `u(0) = 1`, `u'(0) = 0`.
#[derive(Debug, Clone)]
enum RegularSolution {
    Series(SeriesSolutionParams),
    /// `u = e^{-c x} M(β, m, r x)` with `r = sqrt(4k² + n²)`, `c = (n + r)/2`.
    ClosedForm { c: f64, r: f64, beta: f64, m: f64 },
}

impl RegularSolution {
    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        match self {
            RegularSolution::Series(p) => {
                let v = regular_series_eval(p, x)?;
                Ok((v.value, v.derivative))
            }
            &RegularSolution::ClosedForm { c, r, beta, m } => {
                let e = (-c * x).exp();
                let mv = kummer_m(beta, m, r * x)?;
                let dm = beta / m * kummer_m(beta + 1.0, m + 1.0, r * x)?;
                Ok((e * mv, e * (r * dm - c * mv)))
            }
        }
    }
}

/// The singular solution `v`: integrated backward from `x = 1` to `t_stop`,
/// continued below by `A + B φ(t)` with `φ = t^{1-m}` (or `ln t` for m = 1)
/// matched at `t_stop` and `2 t_stop`.
#[derive(Debug, Clone)]
struct SingularSolution {
    dense: DenseSolution<2>,
    t_stop: f64,
    fit_a: f64,
    fit_b: f64,
    m: f64,
}

impl SingularSolution {
    fn phi(&self, t: f64) -> (f64, f64) {
        if (self.m - 1.0).abs() < 1e-12 {
            (t.ln(), 1.0 / t)
        } else {
            let e = 1.0 - self.m;
            (t.powf(e), e * t.powf(e - 1.0))
        }
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        if t >= self.t_stop {
            let y = self.dense.eval(t.min(1.0));
            (y[0], y[1])
        } else {
            let (p, dp) = self.phi(t);
            (self.fit_a + self.fit_b * p, self.fit_b * dp)
        }
    }
}

/// Per-grid quadrature data: GL16 points on every grid interval with the
/// pair sampled there and cubic interpolation weights for the density.
#[derive(Debug, Clone)]
struct KernelTable {
    nodes: Arc<[f64]>,
    u_nodes: Vec<(f64, f64)>,
    /// `v` at the nodes; entry 0 is unused (v is unbounded at the origin).
    v_nodes: Vec<(f64, f64)>,
    /// First node of the 4-point interpolation stencil of each panel.
    stencil_start: Vec<usize>,
    /// Quadrature points of panel `k` are `point_offset[k]..point_offset[k+1]`.
    point_offset: Vec<usize>,
    /// Interpolation weights per quadrature point.
    interp: Vec<[f64; 4]>,
    /// Quadrature weight divided by `W(t)` at each point.
    weight_over_w: Vec<f64>,
    u_points: Vec<f64>,
    v_points: Vec<f64>,
}

/// Homogeneous solutions `u`, `v` of the shifted operator with
/// `u'(0) = 0` and `a1 v(1) + a2 v'(1) = 0`.
#[derive(Debug, Clone)]
pub struct FundamentalPair {
    pub lambda: f64,
    pub m: f64,
    pub n: f64,
    pub boundary: BoundaryForm,
    pub method: PairMethod,
    /// `W(1) = u(1) v'(1) - v(1) u'(1)`.
    pub w1: f64,
    u: RegularSolution,
    v: SingularSolution,
    table: KernelTable,
}

/// Builds `(u, v)` for shift `lambda` and tabulates the kernel quadrature on
/// the grid `g`.
pub fn build_fundamental_pair(p: &ProblemSpec, lambda: f64, g: &GridSpec) -> Result<FundamentalPair> {
    build_pair(p.m, p.n, p.boundary, lambda, g)
}

/// Same as [`build_fundamental_pair`] from bare operator parameters.
pub fn build_pair(m: f64, n: f64, boundary: BoundaryForm, lambda: f64, g: &GridSpec) -> Result<FundamentalPair> {
    if !(m > 0.0) {
        return Err(BvpError::SingularityStrengthNonpositive(m));
    }
    boundary.validate()?;
    if !lambda.is_finite() || !n.is_finite() {
        return Err(BvpError::NonFinite("lambda"));
    }
    if lambda == 0.0 {
        return Err(BvpError::ShiftZeroError);
    }
    let nodes = g.nodes()?;
    let series = RegularSolution::Series(SeriesSolutionParams::new(m, n, lambda));

    let (u, method) = if lambda < 0.0 {
        let r = (n * n - 4.0 * lambda).sqrt();
        let closed = RegularSolution::ClosedForm { c: 0.5 * (n + r), r, beta: m * (n + r) / (2.0 * r), m };
        if r <= KUMMER_MAX_ABS_Z {
            let mut worst: f64 = 0.0;
            for &x in nodes.iter() {
                let (a, _) = closed.eval(x)?;
                let (b, _) = series.eval(x)?;
                worst = worst.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
            }
            if worst >= CROSS_CHECK_TOL {
                return Err(BvpError::CrossCheckFailed(worst));
            }
            (closed, PairMethod::ClosedFormCase1)
        } else {
            (series, PairMethod::SeriesPlusIntegration)
        }
    } else {
        (series, PairMethod::SeriesPlusIntegration)
    };

    let (u1, du1) = u.eval(1.0)?;
    let denom = boundary.apply(u1, du1);
    let mut u_sup = du1.abs();
    for &x in nodes.iter() {
        u_sup = u_sup.max(u.eval(x)?.0.abs());
    }
    let scale = boundary.a1.max(boundary.a2) * u_sup;
    if !(denom.abs() >= 1e-12 * scale) {
        return Err(BvpError::ResonanceError(format!(
            "a1 u(1) + a2 u'(1) = {denom:e} at lambda = {lambda}"
        )));
    }

    let v_end = if boundary.a2 > 0.0 { [boundary.a2, -boundary.a1] } else { [0.0, -1.0] };
    let t_stop = nodes[1].min(V_STOP_CEILING) * V_STOP_FACTOR;
    let rhs = move |x: f64, y: &[f64; 2]| [y[1], -(n + m / x) * y[1] - lambda * y[0]];
    let dense = dopri5(rhs, 1.0, v_end, t_stop, Dopri5Options { rtol: 1e-12, atol: 1e-16, ..Default::default() })?;
    let mut v = SingularSolution { dense, t_stop, fit_a: 0.0, fit_b: 0.0, m };
    let (ta, tb) = (t_stop, 2.0 * t_stop);
    let (pa, _) = v.phi(ta);
    let (pb, _) = v.phi(tb);
    let (va, _) = v.eval(ta);
    let (vb, _) = v.eval(tb);
    v.fit_b = (va - vb) / (pa - pb);
    v.fit_a = va - v.fit_b * pa;
    if !(v.fit_a.is_finite() && v.fit_b.is_finite()) {
        return Err(BvpError::SingularEndpointError(t_stop));
    }

    let w1 = u1 * v_end[1] - v_end[0] * du1;
    let table = tabulate(&u, &v, w1, m, n, nodes)?;
    Ok(FundamentalPair { lambda, m, n, boundary, method, w1, u, v, table })
}

fn tabulate(u: &RegularSolution, v: &SingularSolution, w1: f64, m: f64, n: f64, nodes: Arc<[f64]>) -> Result<KernelTable> {
    let count = nodes.len();
    let mut u_nodes = Vec::with_capacity(count);
    let mut v_nodes = Vec::with_capacity(count);
    for (i, &x) in nodes.iter().enumerate() {
        u_nodes.push(u.eval(x)?);
        v_nodes.push(if i == 0 { (f64::NAN, f64::NAN) } else { v.eval(x) });
    }
    let (xi, wi) = gl16();
    let panels = count - 1;
    let mut stencil_start = Vec::with_capacity(panels);
    let mut point_offset = vec![0];
    let mut interp = Vec::new();
    let mut weight_over_w = Vec::new();
    let mut u_points = Vec::new();
    let mut v_points = Vec::new();
    for k in 0..panels {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let start = k.saturating_sub(1).min(count - 4);
        stencil_start.push(start);
        let xs = [nodes[start], nodes[start + 1], nodes[start + 2], nodes[start + 3]];
        // The first panel touches the singular endpoint, where the integrands
        // behave like t ln t or t^m; it is split geometrically toward 0.
        let pieces: Vec<(f64, f64)> = if k == 0 {
            let mut v = vec![(0.0, b * 0.5f64.powi(FIRST_PANEL_LEVELS))];
            v.extend((0..FIRST_PANEL_LEVELS).rev().map(|j| (b * 0.5f64.powi(j + 1), b * 0.5f64.powi(j))));
            v
        } else {
            vec![(a, b)]
        };
        for (pa, pb) in pieces {
            for q in 0..GL_POINTS {
                let t = 0.5 * (pa + pb) + 0.5 * (pb - pa) * xi[q];
                let mut l = [1.0; 4];
                for (j, lj) in l.iter_mut().enumerate() {
                    for (i, &xn) in xs.iter().enumerate() {
                        if i != j {
                            *lj *= (t - xn) / (xs[j] - xn);
                        }
                    }
                }
                interp.push(l);
                weight_over_w.push(0.5 * (pb - pa) * wi[q] / wronskian(w1, m, n, t));
                u_points.push(u.eval(t)?.0);
                v_points.push(v.eval(t).0);
            }
        }
        point_offset.push(interp.len());
    }
    Ok(KernelTable { nodes, u_nodes, v_nodes, stencil_start, point_offset, interp, weight_over_w, u_points, v_points })
}

fn wronskian(w1: f64, m: f64, n: f64, t: f64) -> f64 {
    w1 * (n * (1.0 - t)).exp() * t.powf(-m)
}

impl FundamentalPair {
    /// `(u(x), u'(x))`.
    pub fn u(&self, x: f64) -> Result<(f64, f64)> {
        self.u.eval(x)
    }

    /// `(v(t), v'(t))` for `t > 0`.
    pub fn v(&self, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return Err(BvpError::DomainError { func: "v", detail: format!("t = {t} (require t > 0)") });
        }
        Ok(self.v.eval(t))
    }

    /// Smallest point reached by the backward integration of `v`.
    pub fn v_cutoff(&self) -> f64 {
        self.v.t_stop
    }

    pub fn nodes(&self) -> &Arc<[f64]> {
        &self.table.nodes
    }

    /// `a1 u(1) + a2 u'(1)`.
    pub fn boundary_denominator(&self) -> f64 {
        let (u1, du1) = *self.table.u_nodes.last().unwrap();
        self.boundary.apply(u1, du1)
    }
}

/// `W(t) = W(1) e^{n(1-t)} t^{-m}`.
pub fn wronskian_at(fp: &FundamentalPair, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(BvpError::DomainError { func: "wronskian_at", detail: format!("t = {t} (require t > 0)") });
    }
    Ok(wronskian(fp.w1, fp.m, fp.n, t))
}

/// `G(x, t) = u(min(x,t)) v(max(x,t)) / W(t)`.
pub fn green_eval(fp: &FundamentalPair, x: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || t > 1.0 || t.is_nan() {
        return Err(BvpError::DomainError { func: "green_eval", detail: format!("(x, t) = ({x}, {t})") });
    }
    if t <= 0.0 {
        if t == 0.0 && fp.m >= 1.0 {
            return Ok(0.0);
        }
        return Err(BvpError::DomainError { func: "green_eval", detail: format!("t = {t} (require t > 0)") });
    }
    let w = wronskian(fp.w1, fp.m, fp.n, t);
    let (lo, hi) = if x <= t { (x, t) } else { (t, x) };
    Ok(fp.u.eval(lo)?.0 * fp.v.eval(hi).0 / w)
}

/// `x ↦ -∫₀¹ G(x,t) h(t) dt` at every node of the pair's grid.
///
/// Each grid interval carries a 16-point Gauss–Legendre rule, so the split
/// at `t = x` falls on panel boundaries. `h` is interpolated by local cubics.
pub fn apply_green(fp: &FundamentalPair, h: &MeshFunction) -> Result<MeshFunction> {
    let tb = &fp.table;
    if !h.same_grid(&MeshFunction::zeros(tb.nodes.clone())) {
        return Err(BvpError::ParameterMismatch("density and kernel use different grids".into()));
    }
    let panels = tb.nodes.len() - 1;
    let mut left = vec![0.0; panels]; // ∫ u h / W per panel
    let mut right = vec![0.0; panels]; // ∫ v h / W per panel
    for k in 0..panels {
        let s = tb.stencil_start[k];
        let (mut pl, mut pr) = (0.0, 0.0);
        for idx in tb.point_offset[k]..tb.point_offset[k + 1] {
            let l = &tb.interp[idx];
            let hq = l[0] * h.values[s] + l[1] * h.values[s + 1] + l[2] * h.values[s + 2] + l[3] * h.values[s + 3];
            let w = tb.weight_over_w[idx] * hq;
            pl += w * tb.u_points[idx];
            pr += w * tb.v_points[idx];
        }
        left[k] = pl;
        right[k] = pr;
    }
    // tail[i] = Σ_{k ≥ i} right[k]
    let mut tail = vec![0.0; panels + 1];
    for k in (0..panels).rev() {
        tail[k] = tail[k + 1] + right[k];
    }
    let mut values = Vec::with_capacity(panels + 1);
    let mut head = 0.0;
    for i in 0..=panels {
        let (u, _) = tb.u_nodes[i];
        let val = if i == 0 { -u * tail[0] } else { -(tb.v_nodes[i].0 * head + u * tail[i]) };
        values.push(val);
        if i < panels {
            head += left[i];
        }
    }
    let d1 = -tb.v_nodes[panels].1 * head;
    Ok(MeshFunction::from_values(tb.nodes.clone(), values)?.with_end_derivatives(0.0, d1))
}

/// `x ↦ C u(x) / (a1 u(1) + a2 u'(1))` on the pair's grid.
pub fn boundary_term(fp: &FundamentalPair, c: f64) -> Result<MeshFunction> {
    let tb = &fp.table;
    let (u1, du1) = *tb.u_nodes.last().unwrap();
    let denom = fp.boundary.apply(u1, du1);
    let u_sup = tb.u_nodes.iter().fold(du1.abs(), |a, p| a.max(p.0.abs()));
    if !(denom.abs() >= 1e-12 * u_sup) {
        return Err(BvpError::ResonanceError(format!("a1 u(1) + a2 u'(1) = {denom:e}")));
    }
    let values = tb.u_nodes.iter().map(|&(u, _)| c * u / denom).collect();
    Ok(MeshFunction::from_values(tb.nodes.clone(), values)?.with_end_derivatives(0.0, c * du1 / denom))
}

/// Outcome of sampling the kernel sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignReport {
    pub max_value: f64,
    pub worst_x: f64,
    pub worst_t: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Tolerance on positive kernel values for a PASS.
pub const SIGN_TOL: f64 = 1e-10;

/// Kernel values on the tensor grid `{i/samples}² ⊂ (0, 1]²`, row-major in x.
pub fn green_tensor(fp: &FundamentalPair, samples: usize) -> Result<Vec<(f64, f64, f64)>> {
    let pts: Vec<f64> = (1..=samples).map(|i| i as f64 / samples as f64).collect();
    let u: Vec<f64> = pts.iter().map(|&x| fp.u.eval(x).map(|p| p.0)).collect::<Result<_>>()?;
    let v: Vec<f64> = pts.iter().map(|&x| fp.v.eval(x).0).collect();
    let w: Vec<f64> = pts.iter().map(|&t| wronskian(fp.w1, fp.m, fp.n, t)).collect();
    let mut out = Vec::with_capacity(samples * samples);
    for i in 0..samples {
        for j in 0..samples {
            let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
            out.push((pts[i], pts[j], u[lo] * v[hi] / w[j]));
        }
    }
    Ok(out)
}

/// Samples `G` on a `samples × samples` grid; PASS iff `max G ≤ 1e-10`.
pub fn green_sign_check(fp: &FundamentalPair, samples: usize) -> Result<SignReport> {
    if samples < 100 {
        return Err(BvpError::DomainError { func: "green_sign_check", detail: format!("samples = {samples} (require >= 100)") });
    }
    let mut report = SignReport { max_value: f64::NEG_INFINITY, worst_x: 0.0, worst_t: 0.0, samples, pass: false };
    for (x, t, g) in green_tensor(fp, samples)? {
        if g > report.max_value || g.is_nan() {
            report.max_value = g;
            report.worst_x = x;
            report.worst_t = t;
            if g.is_nan() {
                break;
            }
        }
    }
    report.pass = report.max_value <= SIGN_TOL;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(m: f64, lambda: f64, b: BoundaryForm, nodes: usize) -> FundamentalPair {
        build_pair(m, 0.0, b, lambda, &GridSpec::uniform(nodes)).unwrap()
    }

    #[test]
    fn closed_form_regular_solutions() {
        let fp = pair(2.0, -1.0, BoundaryForm::dirichlet(0.0), 33);
        assert_eq!(fp.method, PairMethod::ClosedFormCase1);
        assert!((fp.u(1.0).unwrap().0 - 1f64.sinh()).abs() < 1e-13);
        let fp = pair(1.0, -1.0, BoundaryForm::dirichlet(0.0), 33);
        assert!((fp.u(1.0).unwrap().0 - 1.2660658777520084).abs() < 1e-13);
        let fp = pair(2.0, 4.0, BoundaryForm::dirichlet(0.0), 33);
        assert_eq!(fp.method, PairMethod::SeriesPlusIntegration);
    }

    #[test]
    fn terminal_data_and_errors() {
        let b = BoundaryForm::new(2.0, 1.0, 0.0);
        let fp = pair(2.0, -3.0, b, 17);
        let (v1, dv1) = fp.v(1.0).unwrap();
        assert_eq!(b.apply(v1, dv1), 0.0);
        assert_eq!(wronskian_at(&fp, 1.0).unwrap(), fp.w1);
        let g = GridSpec::uniform(17);
        assert_eq!(build_pair(2.0, 0.0, b, 0.0, &g).unwrap_err().kind(), "ShiftZeroError");
        assert_eq!(wronskian_at(&fp, 0.0).unwrap_err().kind(), "DomainError");
        let pi2 = std::f64::consts::PI.powi(2);
        let err = build_pair(2.0, 0.0, BoundaryForm::dirichlet(0.0), pi2, &g).unwrap_err();
        assert_eq!(err.kind(), "ResonanceError");
    }

    #[test]
    fn wronskian_scaling_example() {
        let fp = pair(2.0, -1.0, BoundaryForm::dirichlet(0.0), 17);
        assert!((wronskian_at(&fp, 0.5).unwrap() - 4.0 * fp.w1).abs() < 1e-14 * fp.w1.abs());
    }

    #[test]
    fn kernel_continuous_on_diagonal() {
        let fp = pair(1.0, -1.0, BoundaryForm::dirichlet(0.0), 17);
        for t in [0.1, 0.4, 0.77] {
            let a = green_eval(&fp, t - 1e-6, t).unwrap();
            let b = green_eval(&fp, t + 1e-6, t).unwrap();
            assert!((a - b).abs() <= 1e-5 * a.abs());
        }
        assert_eq!(green_eval(&fp, 0.3, 0.0).unwrap(), 0.0);
        let fp = pair(0.5, -1.0, BoundaryForm::dirichlet(0.0), 17);
        assert!(green_eval(&fp, 0.3, 0.0).is_err());
    }

    #[test]
    fn sign_check_examples() {
        let d = BoundaryForm::dirichlet(0.0);
        assert!(green_sign_check(&pair(1.0, -1.0, d, 17), 100).unwrap().pass);
        assert!(green_sign_check(&pair(2.0, 4.0, d, 17), 100).unwrap().pass);
        let fail = green_sign_check(&pair(2.0, 12.0, d, 17), 100).unwrap();
        assert!(!fail.pass && fail.max_value > 0.0);
    }

    #[test]
    fn bessel_problem_through_the_kernel() {
        let fp = pair(1.0, -1.0, BoundaryForm::dirichlet(0.0), 129);
        let ones = MeshFunction::from_values(fp.nodes().clone(), vec![1.0; 129]).unwrap();
        let s = apply_green(&fp, &ones).unwrap();
        let i0_1 = 1.2660658777520084;
        assert!((s.values[0] - (1.0 - 1.0 / i0_1)).abs() < 1e-10, "{} vs {}", s.values[0], 1.0 - 1.0 / i0_1);
        assert!(s.at_one().abs() < 1e-12);
        let zero = apply_green(&fp, &MeshFunction::zeros(fp.nodes().clone())).unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
    }

    #[test]
    fn boundary_term_examples() {
        let fp = pair(2.0, -1.0, BoundaryForm::dirichlet(1.0), 33);
        let b = boundary_term(&fp, 1.0).unwrap();
        assert!((b.at_one() - 1.0).abs() < 1e-14);
        let x = fp.nodes()[8];
        assert!((b.values[8] - x.sinh() / (x * 1f64.sinh())).abs() < 1e-13);
        assert_eq!(boundary_term(&fp, 0.0).unwrap().sup_norm(), 0.0);
    }
}
