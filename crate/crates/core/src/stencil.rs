//! Finite-difference weights on arbitrary node sets.

/// Fornberg's recursion: weights `w[k][j]` such that
/// `f^(k)(z) ≈ Σ_j w[k][j] f(x[j])` for `k = 0..=order`.
pub fn fd_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First and second derivative of sampled data at node `i`, using `width`
/// nodes centred on `i` where possible and shifted inward at the ends.
pub fn derivatives_at(nodes: &[f64], values: &[f64], i: usize, width: usize) -> (f64, f64) {
    let n = nodes.len();
    let width = width.min(n);
    let half = width / 2;
    let start = i.saturating_sub(half).min(n - width);
    let xs = &nodes[start..start + width];
    let w = fd_weights(nodes[i], xs, 2);
    let d1 = (0..width).map(|j| w[1][j] * values[start + j]).sum();
    let d2 = (0..width).map(|j| w[2][j] * values[start + j]).sum();
    (d1, d2)
}

/// Fourth-order first and second derivatives at node `i`: five-point central
/// stencils in the interior, six one-sided nodes at the two ends.
pub fn fourth_order_derivatives(nodes: &[f64], values: &[f64], i: usize) -> (f64, f64) {
    let n = nodes.len();
    if i >= 2 && i + 2 < n {
        derivatives_at(nodes, values, i, 5)
    } else {
        derivatives_at(nodes, values, i, 6)
    }
}

/// Derivative at an end node from the three nearest nodes.
pub fn three_point_end_derivative(nodes: &[f64], values: &[f64], at_start: bool) -> f64 {
    let n = nodes.len();
    let idx: [usize; 3] = if at_start { [0, 1, 2] } else { [n - 1, n - 2, n - 3] };
    let xs = [nodes[idx[0]], nodes[idx[1]], nodes[idx[2]]];
    let w = fd_weights(xs[0], &xs, 1);
    (0..3).map(|j| w[1][j] * values[idx[j]]).sum()
}
