use std::time::Instant;

use bracket_bvp::eigen::{boundary_functional, principal_eigenvalue};
use bracket_bvp::model::BoundaryForm;

#[test]
fn sphere_dirichlet_is_pi_squared() {
    let t = Instant::now();
    let r = principal_eigenvalue(2.0, 0.0, &BoundaryForm::dirichlet(0.0), 1e-10).unwrap();
    assert!((r.lambda0 - std::f64::consts::PI.powi(2)).abs() < 1e-8);
    assert!(t.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn cylinder_dirichlet_is_first_bessel_zero_squared() {
    // j_{0,1} = 2.404825557695773
    let r = principal_eigenvalue(1.0, 0.0, &BoundaryForm::dirichlet(0.0), 1e-10).unwrap();
    assert!((r.lambda0 - 5.7831859629).abs() < 1e-6);
    assert!((r.lambda0 - 2.404825557695773f64.powi(2)).abs() < 1e-8);
}

#[test]
fn sphere_robin_matches_transcendental_root() {
    // u = sin(kx)/(kx): 2u(1) + u'(1) = 0  <=>  k cot k = -1
    let g = |k: f64| k * k.cos() / k.sin() + 1.0;
    let (mut lo, mut hi) = (1.5f64, 3.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = (0.5 * (lo + hi)).powi(2);
    let r = principal_eigenvalue(2.0, 0.0, &BoundaryForm::new(2.0, 1.0, 0.0), 1e-10).unwrap();
    assert!((r.lambda0 - 4.1158583).abs() < 1e-5);
    assert!((r.lambda0 - oracle).abs() < 1e-8);
}

#[test]
fn functional_keeps_sign_below_principal_eigenvalue() {
    for &(m, n, a1, a2) in &[(1.0, 1.0, 1.0, 1.0), (5.0, 10.0, 6.0, 1.0), (1.0, 0.0, 1.0, 0.0), (3.0, 0.0, 1.0, 0.0), (2.0, 0.0, 1.0, 0.0), (2.0, 0.0, 2.0, 1.0)] {
        let b = BoundaryForm::new(a1, a2, 0.0);
        let l0 = principal_eigenvalue(m, n, &b, 1e-10).unwrap().lambda0;
        for k in 0..40 {
            let lambda = l0 * k as f64 / 40.0;
            assert!(boundary_functional(m, n, &b, lambda).unwrap() > 0.0, "m={m} n={n} lambda={lambda}");
        }
        assert!(boundary_functional(m, n, &b, l0 * 1.05).unwrap() < 0.0);
    }
}

#[test]
fn bracket_contains_estimate() {
    let r = principal_eigenvalue(3.0, 0.0, &BoundaryForm::dirichlet(0.0), 1e-9).unwrap();
    assert!(r.bracket.0 <= r.lambda0 && r.lambda0 <= r.bracket.1);
    assert!(r.bracket.1 - r.bracket.0 <= 1e-9);
    assert!(r.evaluations > 10);
}
