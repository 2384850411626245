//! The shifted linear problem
//! `-s'' - n s' - (m/x) s' - λ s = h`, `s'(0) = 0`, `a1 s(1) + a2 s'(1) = C`,
//! solved through the Green's kernel or by finite differences.

use std::sync::Arc;

use crate::error::{BvpError, Result};
use crate::greens::{apply_green, boundary_term, FundamentalPair};
use crate::model::{BoundaryForm, GridSpec, MeshFunction, ProblemSpec};
use crate::stencil::fourth_order_derivatives;

#[derive(Debug, Clone)]
pub struct LinearBVP {
    pub m: f64,
    pub n: f64,
    pub lambda: f64,
    pub h: MeshFunction,
    pub boundary: BoundaryForm,
}

/// Post-condition tolerance on the boundary conditions of a Green solve.
const GREEN_BC_TOL: f64 = 1e-7;

/// `C u / (a1 u(1) + a2 u'(1)) - ∫ G h`.
pub fn solve_linear_green(lb: &LinearBVP, fp: &FundamentalPair) -> Result<MeshFunction> {
    if lb.m != fp.m || lb.n != fp.n || lb.lambda != fp.lambda || lb.boundary.a1 != fp.boundary.a1 || lb.boundary.a2 != fp.boundary.a2 {
        return Err(BvpError::ParameterMismatch(format!(
            "problem (m={}, n={}, lambda={}, a1={}, a2={}) vs pair (m={}, n={}, lambda={}, a1={}, a2={})",
            lb.m, lb.n, lb.lambda, lb.boundary.a1, lb.boundary.a2, fp.m, fp.n, fp.lambda, fp.boundary.a1, fp.boundary.a2
        )));
    }
    let integral = apply_green(fp, &lb.h)?;
    let bt = boundary_term(fp, lb.boundary.c)?;
    let values = bt.values.iter().zip(&integral.values).map(|(a, b)| a + b).collect();
    let s = MeshFunction::from_values(bt.nodes.clone(), values)?
        .with_end_derivatives(bt.d_at_0 + integral.d_at_0, bt.d_at_1 + integral.d_at_1);
    let scale = 1f64.max(lb.boundary.c.abs()).max(s.sup_norm());
    let robin = lb.boundary.apply(s.at_one(), s.d_at_1) - lb.boundary.c;
    if s.d_at_0.abs() > GREEN_BC_TOL * scale || robin.abs() > GREEN_BC_TOL * scale {
        return Err(BvpError::ConvergenceError {
            what: "kernel solve",
            detail: format!("boundary residuals s'(0) = {:e}, Robin = {robin:e}", s.d_at_0),
        });
    }
    Ok(s)
}

/// Rows of the discrete operator on a (possibly graded) grid.
#[derive(Debug, Clone)]
struct Stencil {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

/// Three-point coefficients `(c_{i-1}, c_i, c_{i+1})` of
/// `-s'' - (n + m/x) s' - λ s` at interior node `i`.
fn interior_row(nodes: &[f64], i: usize, m: f64, n: f64, lambda: f64) -> (f64, f64, f64) {
    let (hm, hp) = (nodes[i] - nodes[i - 1], nodes[i + 1] - nodes[i]);
    let sum = hm + hp;
    let d2 = (2.0 / (hm * sum), -2.0 / (hm * hp), 2.0 / (hp * sum));
    let d1 = (-hp / (hm * sum), (hp - hm) / (hm * hp), hm / (hp * sum));
    let drift = n + m / nodes[i];
    (-d2.0 - drift * d1.0, -d2.1 - drift * d1.1 - lambda, -d2.2 - drift * d1.2)
}

/// Origin row from the limit rule with ghost symmetry `s(-h) = s(h)`.
fn origin_row(nodes: &[f64], m: f64, lambda: f64) -> (f64, f64) {
    let h = nodes[1];
    let k = 2.0 * (1.0 + m) / (h * h);
    (k - lambda, -k)
}

/// Last row for Robin data: ghost node `s_{N+1} = s_{N-1} + 2h s'(1)`
/// eliminated through the equation at x = 1. Returns the coefficients of
/// `s_{N-1}`, `s_N` and of the slope `s'(1)`.
fn robin_row(nodes: &[f64], m: f64, n: f64, lambda: f64) -> (f64, f64, f64) {
    let last = nodes.len() - 1;
    let h = nodes[last] - nodes[last - 1];
    (-2.0 / (h * h), 2.0 / (h * h) - lambda, -2.0 / h - (n + m))
}

fn assemble(nodes: &[f64], m: f64, n: f64, lambda: f64, b: &BoundaryForm) -> (Stencil, f64) {
    let count = nodes.len();
    let mut st = Stencil { lower: vec![0.0; count], diag: vec![0.0; count], upper: vec![0.0; count] };
    let (d0, u0) = origin_row(nodes, m, lambda);
    st.diag[0] = d0;
    st.upper[0] = u0;
    for i in 1..count - 1 {
        let (l, d, u) = interior_row(nodes, i, m, n, lambda);
        st.lower[i] = l;
        st.diag[i] = d;
        st.upper[i] = u;
    }
    let last = count - 1;
    // slope coefficient multiplying s'(1) in the last row, if Robin
    let mut slope_coef = 0.0;
    if b.a2 > 0.0 {
        let (l, d, sc) = robin_row(nodes, m, n, lambda);
        // s'(1) = (C - a1 s_N) / a2
        st.lower[last] = l;
        st.diag[last] = d - sc * b.a1 / b.a2;
        slope_coef = sc;
    } else {
        st.diag[last] = 1.0;
    }
    (st, slope_coef)
}

/// Thomas algorithm with a pivot-size resonance guard.
fn solve_tridiagonal(st: &Stencil, rhs: &[f64]) -> Result<Vec<f64>> {
    let count = rhs.len();
    let scale = st
        .diag
        .iter()
        .chain(&st.lower)
        .chain(&st.upper)
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let mut c = vec![0.0; count];
    let mut d = vec![0.0; count];
    let mut pivot = st.diag[0];
    for i in 0..count {
        if i > 0 {
            pivot = st.diag[i] - st.lower[i] * c[i - 1];
        }
        if !(pivot.abs() >= 1e-12 * scale) {
            return Err(BvpError::ResonanceError(format!("tridiagonal pivot {pivot:e} at row {i}")));
        }
        c[i] = st.upper[i] / pivot;
        d[i] = (rhs[i] - if i > 0 { st.lower[i] * d[i - 1] } else { 0.0 }) / pivot;
    }
    let mut x = d;
    for i in (0..count - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Second-order finite differences on the nodes of `g`.
pub fn solve_linear_fdm(lb: &LinearBVP, g: &GridSpec) -> Result<MeshFunction> {
    let nodes = g.nodes()?;
    if nodes[..] != lb.h.nodes[..] {
        return Err(BvpError::ParameterMismatch("right-hand side lives on a different grid".into()));
    }
    solve_fdm_on(&lb.h.nodes, lb)
}

fn solve_fdm_on(nodes: &Arc<[f64]>, lb: &LinearBVP) -> Result<MeshFunction> {
    if !(lb.m > 0.0) {
        return Err(BvpError::SingularityStrengthNonpositive(lb.m));
    }
    lb.boundary.validate()?;
    let b = lb.boundary;
    let (st, slope_coef) = assemble(nodes, lb.m, lb.n, lb.lambda, &b);
    let last = nodes.len() - 1;
    let mut rhs = lb.h.values.clone();
    if b.a2 > 0.0 {
        rhs[last] -= slope_coef * b.c / b.a2;
    } else {
        rhs[last] = b.c / b.a1;
    }
    let values = solve_tridiagonal(&st, &rhs)?;
    let s = MeshFunction::from_values(nodes.clone(), values)?;
    let d1 = if b.a2 > 0.0 { (b.c - b.a1 * s.at_one()) / b.a2 } else { s.d_at_1 };
    Ok(s.with_end_derivatives(0.0, d1))
}

/// Discrete residual of the nonlinear equation and of its boundary
/// conditions.
#[derive(Debug, Clone)]
pub struct Residual {
    /// `[-s'' - n s' - (m/x) s'] - f(x, s)` per node. At x = 1 the entry is
    /// the equation row with the ghost node taken from `s'(1)` when
    /// `a2 > 0`, and zero for Dirichlet data (no equation there).
    pub interior: MeshFunction,
    /// `s'(0)` as carried by the mesh function.
    pub at_0: f64,
    /// `a1 s(1) + a2 s'(1) - C`.
    pub at_1: f64,
}

impl Residual {
    /// Largest of the equation and boundary residuals.
    pub fn sup(&self) -> f64 {
        self.interior.sup_norm().max(self.at_0.abs()).max(self.at_1.abs())
    }
}

/// `-s'' - n s' - (m/x) s'` at every node from fourth-order difference
/// derivatives (limit rule `-(1+m) s''(0)` at the origin), together with
/// the stencil estimates of `s'(0)` and `s'(1)`.
pub fn fourth_order_operator(m: f64, n: f64, nodes: &[f64], values: &[f64]) -> (Vec<f64>, f64, f64) {
    let count = nodes.len();
    let mut out = Vec::with_capacity(count);
    let (mut d_at_0, mut d_at_1) = (0.0, 0.0);
    for i in 0..count {
        let (d1, d2) = fourth_order_derivatives(nodes, values, i);
        if i == 0 {
            d_at_0 = d1;
            out.push(-(1.0 + m) * d2);
        } else {
            out.push(-d2 - (n + m / nodes[i]) * d1);
        }
        if i == count - 1 {
            d_at_1 = d1;
        }
    }
    (out, d_at_0, d_at_1)
}

/// Applies the finite-difference operator used by [`solve_linear_fdm`]
/// (with `λ = 0`) and subtracts `f(x, s)`.
pub fn nonlinear_residual(p: &ProblemSpec, s: &MeshFunction) -> Result<Residual> {
    let nodes = &s.nodes;
    let count = nodes.len();
    let v = &s.values;
    let mut r = vec![0.0; count];
    let (d0, u0) = origin_row(nodes, p.m, 0.0);
    r[0] = d0 * v[0] + u0 * v[1] - p.eval_f(0.0, v[0])?;
    for i in 1..count - 1 {
        let (l, d, u) = interior_row(nodes, i, p.m, p.n, 0.0);
        r[i] = l * v[i - 1] + d * v[i] + u * v[i + 1] - p.eval_f(nodes[i], v[i])?;
    }
    if p.boundary.a2 > 0.0 {
        let (l, d, sc) = robin_row(nodes, p.m, p.n, 0.0);
        r[count - 1] = l * v[count - 2] + d * v[count - 1] + sc * s.d_at_1 - p.eval_f(1.0, v[count - 1])?;
    }
    let interior = MeshFunction::from_values(nodes.clone(), r)?;
    Ok(Residual {
        interior,
        at_0: s.d_at_0,
        at_1: p.boundary.apply(s.at_one(), s.d_at_1) - p.boundary.c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_on_grid;

    #[test]
    fn quadratic_is_reproduced_exactly() {
        let g = GridSpec::uniform(17);
        let h = eval_on_grid(&g, |_| 6.0).unwrap();
        let lb = LinearBVP { m: 2.0, n: 0.0, lambda: 0.0, h, boundary: BoundaryForm::dirichlet(0.0) };
        let s = solve_linear_fdm(&lb, &g).unwrap();
        for (x, v) in s.nodes.iter().zip(&s.values) {
            assert!((v - (1.0 - x * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn robin_quadratic_on_graded_grid() {
        // s = 1 - x², so s(1) = 0, s'(1) = -2 and 2 s(1) + s'(1) = -2
        let g = GridSpec::graded(33, 1.5);
        let (m, n, lambda) = (1.5, 0.7, -2.0);
        let h = eval_on_grid(&g, |x| 2.0 + 2.0 * n * x + 2.0 * m - lambda * (1.0 - x * x)).unwrap();
        let lb = LinearBVP { m, n, lambda, h, boundary: BoundaryForm::new(2.0, 1.0, -2.0) };
        let s = solve_linear_fdm(&lb, &g).unwrap();
        for (x, v) in s.nodes.iter().zip(&s.values) {
            assert!((v - (1.0 - x * x)).abs() < 1e-12, "x={x}");
        }
        assert!((s.d_at_1 + 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero() {
        let g = GridSpec::uniform(9);
        let lb = LinearBVP { m: 1.0, n: 0.0, lambda: -1.0, h: eval_on_grid(&g, |_| 0.0).unwrap(), boundary: BoundaryForm::dirichlet(0.0) };
        assert_eq!(solve_linear_fdm(&lb, &g).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn resonance_is_detected() {
        // the discrete operator with λ at its smallest eigenvalue
        let g = GridSpec::uniform(9);
        let nodes = g.nodes().unwrap();
        let b = BoundaryForm::dirichlet(0.0);
        let mut lo = 5.0;
        let mut hi = 15.0;
        let det = |lam: f64| {
            let (st, _) = assemble(&nodes, 2.0, 0.0, lam, &b);
            let mut p0 = 1.0;
            let mut p1 = st.diag[0];
            for i in 1..nodes.len() {
                let p2 = st.diag[i] * p1 - st.lower[i] * st.upper[i - 1] * p0;
                p0 = p1;
                p1 = p2;
            }
            p1
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if det(lo) * det(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lb = LinearBVP { m: 2.0, n: 0.0, lambda: lo, h: eval_on_grid(&g, |_| 1.0).unwrap(), boundary: b };
        assert_eq!(solve_linear_fdm(&lb, &g).unwrap_err().kind(), "ResonanceError");
    }
}
