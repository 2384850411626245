//! Principal eigenvalue of `-s'' - n s' - (m/x) s' = λ s`, `s'(0) = 0`,
//! `a1 s(1) + a2 s'(1) = 0`, by scanning the boundary functional of the
//! regular solution and bisecting the first sign change.

use serde::Serialize;

use crate::error::{BvpError, Result};
use crate::model::BoundaryForm;
use crate::specfun::{regular_series_solution, SeriesSolutionParams};

pub const DEFAULT_LAMBDA_SCAN: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenResult {
    pub lambda0: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// `φ(λ) = a1 u_λ(1) + a2 u_λ'(1)`.
pub fn boundary_functional(m: f64, n: f64, b: &BoundaryForm, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(BvpError::DomainError { func: "boundary_functional", detail: format!("lambda = {lambda} (require >= 0)") });
    }
    let (u, du) = regular_series_solution(&SeriesSolutionParams::new(m, n, lambda), 1.0)?;
    Ok(b.apply(u, du))
}

pub fn principal_eigenvalue(m: f64, n: f64, b: &BoundaryForm, tol: f64) -> Result<EigenResult> {
    principal_eigenvalue_with(m, n, b, tol, DEFAULT_LAMBDA_SCAN)
}

/// Scans `[0, lambda_scan]` in steps of `max(1, lambda_scan/64)`, then
/// bisects the first bracketed sign change down to width `tol`.
pub fn principal_eigenvalue_with(m: f64, n: f64, b: &BoundaryForm, tol: f64, lambda_scan: f64) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(BvpError::DomainError { func: "principal_eigenvalue", detail: format!("tol = {tol}") });
    }
    if !(m > 0.0) {
        return Err(BvpError::SingularityStrengthNonpositive(m));
    }
    b.validate()?;
    let step = (lambda_scan / 64.0).max(1.0);
    let mut samples = Vec::new();
    let mut lo = 0.0;
    let mut phi_lo = boundary_functional(m, n, b, lo)?;
    samples.push((lo, phi_lo));
    let mut evaluations = 1;
    let mut hi = None;
    let mut k = 1;
    while lo < lambda_scan {
        let next = (k as f64 * step).min(lambda_scan);
        let phi = boundary_functional(m, n, b, next)?;
        evaluations += 1;
        samples.push((next, phi));
        if phi == 0.0 {
            return Ok(EigenResult { lambda0: next, bracket: (next, next), evaluations });
        }
        if phi.signum() != phi_lo.signum() {
            hi = Some(next);
            break;
        }
        lo = next;
        phi_lo = phi;
        k += 1;
    }
    let Some(mut hi) = hi else {
        return Err(BvpError::NotFoundInRange { ceiling: lambda_scan, samples });
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let phi = boundary_functional(m, n, b, mid)?;
        evaluations += 1;
        if phi == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if phi.signum() == phi_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EigenResult { lambda0: 0.5 * (lo + hi), bracket: (lo, hi), evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functional_examples() {
        let d = BoundaryForm::dirichlet(0.0);
        assert_eq!(boundary_functional(2.0, 0.0, &d, 0.0).unwrap(), 1.0);
        assert_eq!(boundary_functional(1.3, 4.0, &BoundaryForm::new(6.0, 1.0, 0.0), 0.0).unwrap(), 6.0);
        let k = 2.5f64;
        assert!((boundary_functional(2.0, 0.0, &d, k * k).unwrap() - k.sin() / k).abs() < 1e-14);
        assert!(boundary_functional(2.0, 0.0, &d, -1.0).is_err());
    }

    #[test]
    fn dirichlet_sphere() {
        let r = principal_eigenvalue(2.0, 0.0, &BoundaryForm::dirichlet(0.0), 1e-8).unwrap();
        assert!((r.lambda0 - std::f64::consts::PI.powi(2)).abs() < 1e-8);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-8);
    }

    #[test]
    fn not_found_reports_samples() {
        let err = principal_eigenvalue_with(2.0, 0.0, &BoundaryForm::dirichlet(0.0), 1e-8, 5.0).unwrap_err();
        match err {
            BvpError::NotFoundInRange { ceiling, samples } => {
                assert_eq!(ceiling, 5.0);
                assert_eq!(samples.len(), 6);
            }
            e => panic!("unexpected {e:?}"),
        }
    }
}
