//! Closed-form joint moment generating function and mixed moments of the
//! sampled M/G/∞ process. `h[k]` holds `H(kδ)` for lags `k = 0, 1, …`.

use nalgebra::DMatrix;

use crate::dists::ServiceDist;
use crate::sim::GridSpec;

/// `H(kδ)` for `k = 0..n`.
pub fn h_sequence(d: &ServiceDist, grid: &GridSpec) -> Vec<f64> {
    (0..grid.n).map(|k| d.correlation_h(k as f64 * grid.delta)).collect()
}

/// Log of `E exp(Σ θ_m X_m)` for the first `θ.len()` samples; `ρ = λ/μ`.
///
/// Pair terms are accumulated with the intermediate exponent formed as a
/// difference of prefix sums, so no large product is ever materialised.
pub fn log_mgf(h: &[f64], rho: f64, theta: &[f64]) -> f64 {
    let n = theta.len();
    assert!(h.len() >= n.saturating_sub(1).max(1), "H sequence shorter than theta");
    let em1: Vec<f64> = theta.iter().map(|t| t.exp_m1()).collect();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + theta[i];
    }
    let mut s: f64 = em1.iter().sum();
    for k in 1..n {
        if h[k] == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for p in 0..n - k {
            let a = em1[p];
            let b = em1[p + k];
            if a == 0.0 || b == 0.0 {
                continue;
            }
            // Σ θ over the variables strictly between p and p + k.
            let mid = prefix[p + k] - prefix[p + 1];
            acc += a * mid.exp() * b;
        }
        s += h[k] * acc;
    }
    rho * s
}

/// Log-MGF when every `θ_m` equals `theta`.
pub fn log_mgf_equal(h: &[f64], rho: f64, theta: f64, n: usize) -> f64 {
    let e = theta.exp_m1();
    let nf = n as f64;
    let mut s = 0.0;
    for k in 1..n {
        s += (1.0 - k as f64 / nf) * ((k as f64 - 1.0) * theta).exp() * h[k];
    }
    rho * (nf * e + nf * e * e * s)
}

/// Log-MGF of `(X_i, X_j, X_k, X_m)` for sorted indices, written out as the
/// seven-term expansion.
pub fn log_mgf_four(h: &[f64], rho: f64, theta: [f64; 4], idx: [usize; 4]) -> f64 {
    let [i, j, k, m] = idx;
    debug_assert!(i <= j && j <= k && k <= m);
    let [t1, t2, t3, t4] = theta;
    let (e1, e2, e3, e4) = (t1.exp_m1(), t2.exp_m1(), t3.exp_m1(), t4.exp_m1());
    rho * (e1
        + e2
        + e3
        + e4
        + h[j - i] * e1 * e2
        + h[k - j] * e2 * e3
        + h[m - k] * e3 * e4
        + h[k - i] * e1 * t2.exp() * e3
        + h[m - j] * e2 * t3.exp() * e4
        + h[m - i] * e1 * (t2 + t3).exp() * e4)
}

fn span(idx: &[usize]) -> usize {
    idx.iter().max().unwrap() - idx.iter().min().unwrap()
}

/// `E[X_i X_j]`.
pub fn mixed_moment2(h: &[f64], rho: f64, i: usize, j: usize) -> f64 {
    rho * rho + rho * h[i.abs_diff(j)]
}

/// `E[X_i X_j X_k]` for arbitrary indices.
pub fn mixed_moment3(h: &[f64], rho: f64, i: usize, j: usize, k: usize) -> f64 {
    rho.powi(3)
        + rho * rho * (h[i.abs_diff(j)] + h[k.abs_diff(j)] + h[k.abs_diff(i)])
        + rho * h[span(&[i, j, k])]
}

/// `E[X_i X_j X_k X_m]` for arbitrary indices.
pub fn mixed_moment4(h: &[f64], rho: f64, i: usize, j: usize, k: usize, m: usize) -> f64 {
    let d = |a: usize, b: usize| h[a.abs_diff(b)];
    let pairs = d(i, j) + d(i, k) + d(i, m) + d(j, k) + d(j, m) + d(k, m);
    let triples = h[span(&[i, j, k])] + h[span(&[i, j, m])] + h[span(&[j, k, m])] + h[span(&[i, k, m])];
    let products = d(j, i) * d(m, k) + d(k, i) * d(m, j) + d(k, j) * d(m, i);
    rho.powi(4) + rho.powi(3) * pairs + rho * rho * (triples + products) + rho * h[span(&[i, j, k, m])]
}

/// The `ρ²` coefficient of `E[X_i X_j X_k X_m]` for `i ≤ j ≤ k ≤ m`.
pub fn mixed_moment4_rho2_sorted(h: &[f64], i: usize, j: usize, k: usize, m: usize) -> f64 {
    h[k - i] + h[m - j] + 2.0 * h[m - i] + h[j - i] * h[m - k] + h[k - i] * h[m - j] + h[k - j] * h[m - i]
}

/// Covariance matrix `Σ_ij = H(|i − j| δ)` of `n` consecutive samples
/// (divide by ρ for the covariance of `X`, multiply by ρ for `R`).
pub fn covariance_matrix<F: Fn(f64) -> f64>(h: F, grid: &GridSpec) -> DMatrix<f64> {
    let lags: Vec<f64> = (0..grid.n).map(|k| h(k as f64 * grid.delta)).collect();
    DMatrix::from_fn(grid.n, grid.n, |i, j| lags[i.abs_diff(j)])
}
