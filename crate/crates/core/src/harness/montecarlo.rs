use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dists::ServiceDist;
use crate::error::Result;
use crate::rng::derive_seed;
use crate::sim::{simulate_samples, GridSpec};
use crate::stats;

/// Runs `f(seed)` for `replicates` seeds derived from `(master, stream, i)`.
/// Results come back in replicate order whatever the thread count.
pub fn replicate<T, F>(replicates: usize, master: u64, stream: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    (0..replicates)
        .into_par_iter()
        .map(|i| f(derive_seed(master, stream, i as u64)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
}

impl MeanEstimate {
    pub fn from_values(xs: &[f64]) -> Self {
        Self {
            mean: stats::mean(xs),
            se: (stats::variance(xs) / xs.len() as f64).sqrt(),
        }
    }

    /// `|mean − target|` in standard errors.
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.se
    }
}

/// Sample mean of `exp(Σ θ_i X_i)` over independent stationary paths of
/// length `θ.len()`.
pub fn empirical_mgf(
    d: &ServiceDist,
    lambda: f64,
    delta: f64,
    theta: &[f64],
    replicates: usize,
    master: u64,
    stream: u64,
) -> Result<MeanEstimate> {
    let grid = GridSpec::new(delta, theta.len())?;
    let vals = replicate(replicates, master, stream, |seed| {
        simulate_samples(d, lambda, grid, seed)
            .map(|x| x.iter().zip(theta).map(|(&x, t)| x as f64 * t).sum::<f64>().exp())
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    Ok(MeanEstimate::from_values(&vals))
}
