//! Parametric covariance functions used in Gaussian experiments.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CovarianceFamily {
    /// `σ² exp(−r|t|)`.
    Exponential { variance: f64, rate: f64 },
    /// `σ² exp(−t²/(2ℓ²))`.
    SquaredExponential { variance: f64, scale: f64 },
}

impl CovarianceFamily {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = match *self {
            Self::Exponential { variance, rate } => (variance, rate),
            Self::SquaredExponential { variance, scale } => (variance, scale),
        };
        ensure(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite(), || {
            format!("covariance parameters must be positive: {self:?}")
        })
    }

    pub fn gamma(&self, t: f64) -> f64 {
        match *self {
            Self::Exponential { variance, rate } => variance * (-rate * t.abs()).exp(),
            Self::SquaredExponential { variance, scale } => variance * (-0.5 * (t / scale).powi(2)).exp(),
        }
    }

    /// `γ'(t)` for `t > 0`.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Self::Exponential { variance, rate } => -rate * variance * (-rate * t).exp(),
            Self::SquaredExponential { variance, scale } => {
                -t / (scale * scale) * variance * (-0.5 * (t / scale).powi(2)).exp()
            }
        }
    }

    /// `∫ |γ|` over the real line.
    pub fn l1_norm(&self) -> f64 {
        match *self {
            Self::Exponential { variance, rate } => 2.0 * variance / rate,
            Self::SquaredExponential { variance, scale } => {
                variance * scale * (2.0 * std::f64::consts::PI).sqrt()
            }
        }
    }

    /// `γ(kδ)` for `k = 0..count`.
    pub fn lags(&self, delta: f64, count: usize) -> Vec<f64> {
        (0..count).map(|k| self.gamma(k as f64 * delta)).collect()
    }
}
