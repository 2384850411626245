//! Helpers shared by the integration tests: a seeded source of smooth
//! random functions and a damped Newton solver written independently of
//! the library's linear solvers.

#![allow(dead_code)]

use bracket_bvp::model::{BoundaryForm, GridSpec, ProblemSpec};
use bracket_bvp::monotone::{solve_region, RegionSettings};
use bracket_bvp::problems::CatalogEntry;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `c0 + Σ_{k=1,2} c_k cos(kπx) + d_k sin(kπx/2)` with coefficients in [-1, 1].
pub fn smooth_signed(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 + Clone {
    let c: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
    let d: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
    move |x: f64| {
        let pi = std::f64::consts::PI;
        let mut v = c[0];
        for k in 1..3 {
            v += c[k] * (k as f64 * pi * x).cos() + d[k - 1] * (0.5 * k as f64 * pi * x).sin();
        }
        v
    }
}

/// Non-negative combination of a constant and four Gaussian bumps.
pub fn smooth_nonnegative(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 + Clone {
    let base: f64 = rng.random_range(0.0..0.5);
    let bumps: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| (rng.random_range(0.0..2.0), rng.random_range(0.0..1.0), rng.random_range(0.08..0.4)))
        .collect();
    move |x: f64| base + bumps.iter().map(|&(w, mu, sig)| w * (-(x - mu).powi(2) / (2.0 * sig * sig)).exp()).sum::<f64>()
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let denom = diag[i] - if i > 0 { lower[i] * c[i - 1] } else { 0.0 };
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - if i > 0 { lower[i] * d[i - 1] } else { 0.0 }) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// Residual of the centered scheme on a uniform grid with `count` nodes.
fn newton_residual(p: &ProblemSpec, s: &[f64], h: f64) -> Vec<f64> {
    let (m, n, b) = (p.m, p.n, p.boundary);
    let last = s.len() - 1;
    let f = |i: usize, v: f64| (p.f)(i as f64 * h, v);
    let mut r = vec![0.0; s.len()];
    r[0] = -(1.0 + m) * 2.0 * (s[1] - s[0]) / (h * h) - f(0, s[0]);
    for i in 1..last {
        let x = i as f64 * h;
        r[i] = -(s[i + 1] - 2.0 * s[i] + s[i - 1]) / (h * h) - (n + m / x) * (s[i + 1] - s[i - 1]) / (2.0 * h) - f(i, s[i]);
    }
    r[last] = if b.a2 > 0.0 {
        let slope = (b.c - b.a1 * s[last]) / b.a2;
        let ghost = s[last - 1] + 2.0 * h * slope;
        -(ghost - 2.0 * s[last] + s[last - 1]) / (h * h) - (n + m) * slope - f(last, s[last])
    } else {
        s[last] - b.c / b.a1
    };
    r
}

/// Damped Newton iteration for the three-point discretization with the
/// Jacobian of `f` taken by central differences. Returns the nodal values.
pub fn damped_newton(p: &ProblemSpec, start: &[f64]) -> Vec<f64> {
    let count = start.len();
    let h = 1.0 / (count - 1) as f64;
    let (m, n, b) = (p.m, p.n, p.boundary);
    let last = count - 1;
    let dfds = |x: f64, v: f64| {
        let e = 1e-7 * (1.0 + v.abs());
        ((p.f)(x, v + e) - (p.f)(x, v - e)) / (2.0 * e)
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut s = start.to_vec();
    let mut r = newton_residual(p, &s, h);
    for _ in 0..100 {
        if norm(&r) < 1e-11 {
            break;
        }
        let (mut lo, mut di, mut up) = (vec![0.0; count], vec![0.0; count], vec![0.0; count]);
        di[0] = 2.0 * (1.0 + m) / (h * h) - dfds(0.0, s[0]);
        up[0] = -2.0 * (1.0 + m) / (h * h);
        for i in 1..last {
            let x = i as f64 * h;
            let drift = n + m / x;
            lo[i] = -1.0 / (h * h) + drift / (2.0 * h);
            di[i] = 2.0 / (h * h) - dfds(x, s[i]);
            up[i] = -1.0 / (h * h) - drift / (2.0 * h);
        }
        if b.a2 > 0.0 {
            lo[last] = -2.0 / (h * h);
            di[last] = 2.0 / (h * h) + (2.0 * h / (h * h) + (n + m)) * b.a1 / b.a2 - dfds(1.0, s[last]);
        } else {
            di[last] = 1.0;
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = thomas(&lo, &di, &up, &neg);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = s.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            let rt = newton_residual(p, &trial, h);
            if norm(&rt) < norm(&r) || t < 1e-4 {
                s = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
    }
    assert!(norm(&r) < 1e-8, "Newton did not converge: residual {:e}", norm(&r));
    s
}

/// Dirichlet data helper for the linear closed-form problems.
pub fn dirichlet(c: f64) -> BoundaryForm {
    BoundaryForm::dirichlet(c)
}

/// `I₀(1)` from its power series.
pub fn bessel_i0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= (x / 2.0).powi(2) / (k * k) as f64;
        sum += term;
    }
    sum
}

/// Shift the engine picks for a catalog entry on 257 nodes.
pub fn engine_lambda(e: &CatalogEntry) -> f64 {
    let g = GridSpec::uniform(257);
    let cert = solve_region(&e.problem, &e.alpha0_on(&g).unwrap(), &e.beta0_on(&g).unwrap(), &RegionSettings::new(g));
    cert.lambda_used.expect("catalog run chooses a shift")
}
