//! Exact sampling of stationary Gaussian sequences by circulant embedding,
//! with a dense Cholesky fallback.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex64, Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

enum Backend {
    Circulant {
        sqrt_eig: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Dense(DMatrix<f64>),
}

/// Reusable sampler for `N(0, T_n(γ))`.
pub struct CirculantSampler {
    n: usize,
    backend: Backend,
}

const DENSE_LIMIT: usize = 4096;

impl CirculantSampler {
    /// `gamma` holds lags `0..` (at least `n`; one more lets the embedding
    /// use a `2n` circulant).
    pub fn new(gamma: &[f64], n: usize) -> Result<Self> {
        if n == 0 || gamma.len() < n {
            return Err(Error::InvalidParameter(format!(
                "need at least n = {n} covariance lags, got {}",
                gamma.len()
            )));
        }
        if n == 1 {
            return Self::dense(gamma, n);
        }
        let m = if gamma.len() > n { 2 * n } else { 2 * (n - 1) };
        let mut c: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new(gamma[j.min(m - j)], 0.0))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut c);
        let max = c.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min = c.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min >= -1e-10 * max.abs() {
            let sqrt_eig = c.iter().map(|z| (z.re.max(0.0) / m as f64).sqrt()).collect();
            return Ok(Self {
                n,
                backend: Backend::Circulant { sqrt_eig, fft },
            });
        }
        if n > DENSE_LIMIT {
            return Err(Error::NotPositiveDefinite { min_eig: min });
        }
        Self::dense(gamma, n)
    }

    fn dense(gamma: &[f64], n: usize) -> Result<Self> {
        let base = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
        let scale = gamma[0].abs().max(f64::MIN_POSITIVE);
        let mut jitter = 0.0;
        loop {
            let mut m = base.clone();
            for i in 0..n {
                m[(i, i)] += jitter * scale;
            }
            if let Some(ch) = m.cholesky() {
                return Ok(Self {
                    n,
                    backend: Backend::Dense(ch.l()),
                });
            }
            jitter = if jitter == 0.0 { 1e-14 } else { jitter * 10.0 };
            if jitter > 1e-10 * (1.0 + 1e-9) {
                let min_eig = base.symmetric_eigenvalues().min();
                return Err(Error::NotPositiveDefinite { min_eig });
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn uses_circulant(&self) -> bool {
        matches!(self.backend, Backend::Circulant { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.backend {
            Backend::Circulant { sqrt_eig, fft } => {
                let mut buf: Vec<Complex64> = sqrt_eig
                    .iter()
                    .map(|s| {
                        let a: f64 = rng.sample(StandardNormal);
                        let b: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * a, s * b)
                    })
                    .collect();
                fft.process(&mut buf);
                buf[..self.n].iter().map(|z| z.re).collect()
            }
            Backend::Dense(l) => {
                let z = nalgebra::DVector::from_fn(self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
                (l * z).iter().copied().collect()
            }
        }
    }
}

/// One draw of `n` consecutive values with covariance lags `gamma`.
pub fn sample_stationary_gaussian(gamma: &[f64], n: usize, seed: u64) -> Result<Vec<f64>> {
    let s = CirculantSampler::new(gamma, n)?;
    Ok(s.sample(&mut rng_from_seed(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn white_noise_marginal() {
        let mut g = vec![0.0; 4097];
        g[0] = 1.0;
        let x = sample_stationary_gaussian(&g, 4096, 9).unwrap();
        let mut v = x.clone();
        v.sort_by(f64::total_cmp);
        let nrm = Normal::new(0.0, 1.0).unwrap();
        let n = v.len() as f64;
        let ks = v
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let c = nrm.cdf(*x);
                (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
            })
            .fold(0.0, f64::max);
        // 0.1% critical value of the KS statistic.
        assert!(ks < 1.95 / n.sqrt(), "ks = {ks}");
    }

    #[test]
    fn exponential_lag_one() {
        let delta = 0.25;
        let g: Vec<f64> = (0..=8).map(|k| (-(k as f64) * delta).exp()).collect();
        let s = CirculantSampler::new(&g, 8).unwrap();
        assert!(s.uses_circulant());
        let mut rng = rng_from_seed(1);
        let reps = 100_000;
        let prods: Vec<f64> = (0..reps)
            .map(|_| {
                let x = s.sample(&mut rng);
                x[3] * x[4]
            })
            .collect();
        let m = crate::stats::mean(&prods);
        let se = (crate::stats::variance(&prods) / reps as f64).sqrt();
        assert!((m - (-delta).exp()).abs() < 3.0 * se, "{m}");
    }

    #[test]
    fn sample_covariance_converges() {
        let n = 6;
        let g: Vec<f64> = (0..n).map(|k| (-(k as f64) * 0.5).exp() * (1.3 * k as f64).cos()).collect();
        let s = CirculantSampler::new(&g, n).unwrap();
        let mut rng = rng_from_seed(2);
        let target = DMatrix::from_fn(n, n, |i, j| g[i.abs_diff(j)]);
        let mut errs = Vec::new();
        let mut acc = DMatrix::zeros(n, n);
        let mut done = 0;
        for reps in [1000, 10_000, 100_000] {
            while done < reps {
                let x = nalgebra::DVector::from_vec(s.sample(&mut rng));
                acc += &x * x.transpose();
                done += 1;
            }
            errs.push((&acc / done as f64 - &target).norm());
        }
        assert!(errs[2] < errs[0] && errs[2] < 0.03, "{errs:?}");
    }

    #[test]
    fn fallback_and_rejection() {
        // Triangular covariance has a non-PSD minimal embedding for some n.
        let g: Vec<f64> = (0..5).map(|k| (1.0 - 0.3 * k as f64).max(0.0)).collect();
        let s = CirculantSampler::new(&g, 5).unwrap();
        assert_eq!(s.sample(&mut rng_from_seed(3)).len(), 5);
        let bad = [1.0, 2.0, 0.0];
        assert!(matches!(
            CirculantSampler::new(&bad, 3),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let g: Vec<f64> = (0..65).map(|k| (-(k as f64) * 0.1).exp()).collect();
        assert_eq!(
            sample_stationary_gaussian(&g, 64, 5).unwrap(),
            sample_stationary_gaussian(&g, 64, 5).unwrap()
        );
    }
}
