//! Dormand–Prince 5(4) with step-size control and Hermite dense output.

use crate::error::{BvpError, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Step cap as a fraction of the integration span; keeps the cubic
    /// Hermite dense output close to the integrator's own accuracy.
    pub max_step_fraction: f64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options { rtol: 1e-10, atol: 1e-14, max_steps: 200_000, max_step_fraction: 1.0 / 128.0 }
    }
}

/// Accepted steps in ascending `x`, with states and slopes for Hermite
/// interpolation.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub fs: Vec<[f64; N]>,
}

impl<const N: usize> DenseSolution<N> {
    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Cubic Hermite interpolation; `x` must lie in `[x_min, x_max]`.
    pub fn eval(&self, x: f64) -> [f64; N] {
        let k = match self.xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(0) => 0,
            Err(i) if i >= self.xs.len() => self.xs.len() - 2,
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        std::array::from_fn(|i| h00 * self.ys[k][i] + h10 * h * self.fs[k][i] + h01 * self.ys[k + 1][i] + h11 * h * self.fs[k + 1][i])
    }
}

/// Integrates `y' = f(x, y)` from `x0` to `x_end` (either direction).
pub fn dopri5<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    opts: Dopri5Options,
) -> Result<DenseSolution<N>> {
    let dir = (x_end - x0).signum();
    let span = (x_end - x0).abs();
    let h_max = span * opts.max_step_fraction;
    let mut x = x0;
    let mut y = y0;
    let mut k0 = f(x, &y);
    let mut h = dir * (span * 1e-3).max(1e-12);
    let mut xs = vec![x];
    let mut ys = vec![y];
    let mut fs = vec![k0];
    let mut steps = 0;
    while (x_end - x) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(BvpError::SingularEndpointError(x));
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys_ = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys_[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(x + C[s] * h, &ys_);
        }
        let mut y_new = y;
        for i in 0..N {
            for s in 0..6 {
                y_new[i] += h * A[6][s] * k[s][i];
            }
        }
        // FSAL: the seventh stage sits at (x + h, y_new).
        k[6] = f(x + h, &y_new);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h.abs() < 1e-14 * x.abs().max(1e-300) {
                return Err(BvpError::SingularEndpointError(x));
            }
            continue;
        }
        if err <= 1.0 {
            x = if (x + h - x_end).abs() < 1e-15 * span { x_end } else { x + h };
            y = y_new;
            k0 = k[6];
            xs.push(x);
            ys.push(y);
            fs.push(k0);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() > h_max {
            h = dir * h_max;
        }
        if h.abs() < 1e-14 * x.abs().max(1e-300) {
            return Err(BvpError::SingularEndpointError(x));
        }
    }
    if dir < 0.0 {
        xs.reverse();
        ys.reverse();
        fs.reverse();
    }
    Ok(DenseSolution { xs, ys, fs })
}
