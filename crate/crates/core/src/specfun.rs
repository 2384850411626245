//! Gamma, confluent hypergeometric and Laguerre functions, and the regular
//! power-series solution of the shifted homogeneous operator.

use crate::error::{BvpError, Result};
use crate::quad::integrate_adaptive;

/// Largest `|z|` accepted by the hypergeometric series.
pub const KUMMER_MAX_ABS_Z: f64 = 60.0;
const KUMMER_MAX_TERMS: usize = 20_000;

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(BvpError::DomainError { func: "ln_gamma", detail: format!("x = {x} (require x > 0)") });
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `Γ(x)` on the whole real line except the poles.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(BvpError::PoleError { func: "gamma", at: x });
    }
    Ok(statrs::function::gamma::gamma(x))
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

/// Plain series with its absolute-term sum, for conditioning decisions.
fn kummer_series(a: f64, b: f64, z: f64, max_terms: usize) -> Result<(f64, f64)> {
    let mut acc = CompensatedSum::default();
    let mut abs_sum = 0.0;
    let mut term = 1.0;
    acc.add(term);
    abs_sum += 1.0;
    let terminates = is_nonpositive_integer(a);
    let mut small_run = 0;
    for k in 0..max_terms {
        let kf = k as f64;
        term *= (a + kf) * z / ((b + kf) * (kf + 1.0));
        acc.add(term);
        abs_sum += term.abs();
        if term == 0.0 && (terminates || z == 0.0) {
            return Ok((acc.value(), abs_sum));
        }
        if term.abs() < 1e-16 * acc.value().abs() {
            small_run += 1;
            if small_run == 3 {
                return Ok((acc.value(), abs_sum));
            }
        } else {
            small_run = 0;
        }
    }
    Err(BvpError::ConvergenceError {
        what: "kummer_m series",
        detail: format!("a={a}, b={b}, z={z} after {max_terms} terms"),
    })
}

/// Kummer's function `M(a, b, z) = Σ (a)_k z^k / ((b)_k k!)`.
///
/// The direct series is used when it is well conditioned; otherwise the
/// Kummer transformation `e^z M(b - a, b, -z)` is tried and the better
/// conditioned of the two is returned.
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(BvpError::PoleError { func: "kummer_m", at: b });
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) || z.abs() > KUMMER_MAX_ABS_Z {
        return Err(BvpError::DomainError {
            func: "kummer_m",
            detail: format!("a={a}, b={b}, z={z} (series regime |z| <= {KUMMER_MAX_ABS_Z})"),
        });
    }
    let direct = kummer_series(a, b, z, KUMMER_MAX_TERMS);
    let direct_cond = match &direct {
        Ok((v, abs_sum)) => abs_sum / v.abs(),
        Err(_) => f64::INFINITY,
    };
    if direct_cond <= 1024.0 || is_nonpositive_integer(a) {
        return direct.map(|(v, _)| v);
    }
    match kummer_series(b - a, b, -z, KUMMER_MAX_TERMS) {
        Ok((v, abs_sum)) if abs_sum / v.abs() < direct_cond => Ok(z.exp() * v),
        _ => direct.map(|(v, _)| v),
    }
}

/// Generalized Laguerre function
/// `L_α^ν(z) = Γ(α+ν+1) / (Γ(α+1) Γ(ν+1)) · M(-α, ν+1, z)`.
pub fn laguerre_general(alpha: f64, nu: f64, z: f64) -> Result<f64> {
    if !(nu > -1.0) {
        return Err(BvpError::DomainError { func: "laguerre_general", detail: format!("nu = {nu} (require nu > -1)") });
    }
    let norm = if alpha >= 0.0 && alpha.fract() == 0.0 {
        // binomial(α + ν, α)
        (1..=alpha as u64).fold(1.0, |acc, j| acc * (nu + j as f64) / j as f64)
    } else {
        if !(alpha + nu + 1.0 > 0.0) {
            return Err(BvpError::DomainError {
                func: "laguerre_general",
                detail: format!("alpha + nu + 1 = {} (require > 0)", alpha + nu + 1.0),
            });
        }
        if is_nonpositive_integer(alpha + 1.0) {
            return Err(BvpError::PoleError { func: "laguerre_general", at: alpha + 1.0 });
        }
        let log_ratio = ln_gamma(alpha + nu + 1.0)? - ln_gamma(nu + 1.0)?;
        let denom = if alpha + 1.0 > 0.0 { ln_gamma(alpha + 1.0)?.exp() } else { gamma(alpha + 1.0)? };
        log_ratio.exp() / denom
    };
    Ok(norm * kummer_m(-alpha, nu + 1.0, z)?)
}

/// Tricomi's function `U(a, b, z)` for `a > 0`, `z > 0`, from
/// `U = Γ(a)^{-1} ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt`.
///
/// The integral is taken in the variable `y = ln t`, which removes the
/// endpoint singularity of `t^{a-1}` and maps the half line onto a finite
/// window once the negligible tails are cut.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !(z > 0.0) || !b.is_finite() || !a.is_finite() || !z.is_finite() {
        return Err(BvpError::DomainError { func: "tricomi_u", detail: format!("a={a}, z={z} (require a > 0, z > 0)") });
    }
    let c = b - a - 1.0;
    let log_integrand = |y: f64| {
        let t = y.exp();
        a * y - z * t + c * t.ln_1p()
    };
    let mut peak = f64::NEG_INFINITY;
    let mut y = -60.0;
    while y <= 12.0 {
        peak = peak.max(log_integrand(y));
        y += 0.25;
    }
    let cut = 45.0 - a.ln().min(0.0);
    let mut y_lo = -1.0;
    while log_integrand(y_lo) > peak - cut && y_lo > -1e4 {
        y_lo *= 1.5;
    }
    let mut y_hi = 1.0;
    while log_integrand(y_hi) > peak - 45.0 && y_hi < 50.0 {
        y_hi += 0.5;
    }
    let integral = integrate_adaptive(|y| (log_integrand(y) - peak).exp(), y_lo, y_hi, 1e-13, 0.0, 4000)?;
    Ok((peak + integral.ln() - ln_gamma(a)?).exp())
}

/// Parameters of the regular series solution of
/// `x s'' + (n x + m) s' + λ x s = 0`, `s(0) = 1`, `s'(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSolutionParams {
    pub m: f64,
    pub n: f64,
    pub lambda: f64,
    pub max_terms: usize,
    pub tol: f64,
}

impl SeriesSolutionParams {
    pub fn new(m: f64, n: f64, lambda: f64) -> Self {
        SeriesSolutionParams { m, n, lambda, max_terms: 2000, tol: 1e-17 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) {
            return Err(BvpError::SingularityStrengthNonpositive(self.m));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-6) {
            return Err(BvpError::DomainError { func: "regular_series_solution", detail: format!("tol = {}", self.tol) });
        }
        if self.max_terms < 50 {
            return Err(BvpError::DomainError {
                func: "regular_series_solution",
                detail: format!("max_terms = {}", self.max_terms),
            });
        }
        Ok(())
    }
}

/// Value, first and second derivative of the regular solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub derivative: f64,
    pub second: f64,
}

/// Sums `Σ c_j x^j` with `c_j = -[n (j-1) c_{j-1} + λ c_{j-2}] / (j (j+m-1))`,
/// `c_0 = 1`, `c_1 = 0`, together with the term-wise derivatives.
pub fn regular_series_eval(p: &SeriesSolutionParams, x: f64) -> Result<SeriesValue> {
    p.validate()?;
    let SeriesSolutionParams { m, n, lambda, max_terms, tol } = *p;
    let mut val = CompensatedSum::default();
    let mut der = CompensatedSum::default();
    let mut sec = CompensatedSum::default();
    val.add(1.0);
    // c_{j-2}, c_{j-1}
    let (mut c_prev2, mut c_prev1) = (1.0, 0.0);
    // x^{j-2} carried as powers of x
    let mut small_run = 0;
    let mut xp_jm2 = 1.0; // x^{j-2} for j = 2
    for j in 2..max_terms {
        let jf = j as f64;
        let c = -(n * (jf - 1.0) * c_prev1 + lambda * c_prev2) / (jf * (jf + m - 1.0));
        let t2 = jf * (jf - 1.0) * c * xp_jm2;
        let t1 = jf * c * xp_jm2 * x;
        let t0 = c * xp_jm2 * x * x;
        val.add(t0);
        der.add(t1);
        sec.add(t2);
        let (sv, sd, ss) = (val.value().abs(), der.value().abs(), sec.value().abs());
        let small = t0.abs() <= tol * sv
            && t1.abs() <= tol * sd.max(sv)
            && t2.abs() <= tol * ss.max(sd).max(sv);
        if small {
            small_run += 1;
            if small_run == 3 {
                return Ok(SeriesValue { value: val.value(), derivative: der.value(), second: sec.value() });
            }
        } else {
            small_run = 0;
        }
        c_prev2 = c_prev1;
        c_prev1 = c;
        xp_jm2 *= x;
    }
    Err(BvpError::ConvergenceError {
        what: "regular series solution",
        detail: format!("m={m}, n={n}, lambda={lambda}, x={x}"),
    })
}

/// `(s(x), s'(x))` of the regular solution.
pub fn regular_series_solution(p: &SeriesSolutionParams, x: f64) -> Result<(f64, f64)> {
    let v = regular_series_eval(p, x)?;
    Ok((v.value, v.derivative))
}
