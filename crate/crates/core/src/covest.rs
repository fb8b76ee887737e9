//! Empirical mean and autocovariance of gridded samples.

use crate::dists::ServiceDist;
use crate::error::{Error, Result};
use crate::lpweights::SegmentCase;
use crate::sim::GridSpec;
use crate::stats::neumaier_sum;

fn check_lag(samples: &[f64], k: usize) -> Result<()> {
    if k >= samples.len() {
        Err(Error::LagOutOfRange {
            lag: k,
            n: samples.len(),
        })
    } else {
        Ok(())
    }
}

/// `ρ̂_k`: mean of the first `n − k` samples.
pub fn rho_hat(samples: &[f64], k: usize) -> Result<f64> {
    check_lag(samples, k)?;
    let m = samples.len() - k;
    Ok(neumaier_sum(samples[..m].iter().copied()) / m as f64)
}

/// `R̂_k = (1/(n−k)) Σ (X_i − ρ̂_k)(X_{i+k} − ρ̂_k)`.
pub fn r_hat(samples: &[f64], k: usize) -> Result<f64> {
    let rho = rho_hat(samples, k)?;
    let m = samples.len() - k;
    let s = neumaier_sum((0..m).map(|i| (samples[i] - rho) * (samples[i + k] - rho)));
    Ok(s / m as f64)
}

/// `(1/(n−k)) Σ X_i X_{i+k}`, for processes with known zero mean.
pub fn r_hat_uncentered(samples: &[f64], k: usize) -> Result<f64> {
    check_lag(samples, k)?;
    let m = samples.len() - k;
    let s = neumaier_sum((0..m).map(|i| samples[i] * samples[i + k]));
    Ok(s / m as f64)
}

/// `R̂_k` for every lag in `lags`, in the same order.
pub fn r_hat_lags(samples: &[f64], lags: impl IntoIterator<Item = usize>, centered: bool) -> Result<Vec<f64>> {
    lags.into_iter()
        .map(|k| {
            if centered {
                r_hat(samples, k)
            } else {
                r_hat_uncentered(samples, k)
            }
        })
        .collect()
}

/// `ψ(x0, h)` in the variance bound for each window placement.
pub fn psi(x0: f64, h: f64, grid: &GridSpec) -> f64 {
    let t = grid.horizon();
    match crate::lpweights::segment_case(x0, h, t, grid.delta) {
        SegmentCase::Left => t - 2.0 * h,
        SegmentCase::Interior => t - x0 - h,
        SegmentCase::Right => grid.delta,
    }
}

/// Per-lag variance bound `C₄ δ (ρ² + ρ) Σ_{i=1}^{n} H(iδ) / (h² ψ)`.
pub fn variance_bound(d: &ServiceDist, lambda: f64, grid: &GridSpec, h: f64, x0: f64, c4: f64) -> f64 {
    let rho = lambda * d.mean();
    let sum_h = neumaier_sum((1..=grid.n).map(|i| d.correlation_h(i as f64 * grid.delta)));
    c4 * grid.delta * (rho * rho + rho) * sum_h / (h * h * psi(x0, h, grid))
}

/// `Σ_{i≥1} H(iδ) ≤ μ K / (2δ)` where `K` bounds the second moment.
pub fn sum_h_bound(d: &ServiceDist, k: f64, delta: f64) -> f64 {
    d.rate() * k / (2.0 * delta)
}
