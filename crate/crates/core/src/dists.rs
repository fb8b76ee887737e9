//! Service-time distributions and the M/G/∞ correlation function
//! `H(t) = μ ∫_{|t|}^∞ (1 − G(x)) dx`.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, LogNormal, Weibull};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

use crate::error::{ensure, Error, Result};
use crate::quad;

/// Parametric family of the service-time law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Uniform { a: f64, b: f64 },
    #[serde(rename = "lognormal")]
    LogNormal { mu: f64, sigma: f64 },
    DiracMixture { atoms: Vec<f64>, weights: Vec<f64> },
}

/// Smoothness class `C_β(L, I, K)` with the second-moment bound `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderClass {
    pub beta: f64,
    pub lipschitz: f64,
    pub interval: (f64, f64),
    pub moment_bound: f64,
}

impl HolderClass {
    pub fn new(beta: f64, lipschitz: f64, interval: (f64, f64), moment_bound: f64) -> Result<Self> {
        ensure(beta > 0.0 && beta.is_finite(), || format!("beta must be positive, got {beta}"))?;
        ensure(lipschitz > 0.0 && lipschitz.is_finite(), || {
            format!("L must be positive, got {lipschitz}")
        })?;
        ensure(interval.0 >= 0.0 && interval.0 < interval.1, || {
            format!("interval must satisfy 0 <= a < b, got {interval:?}")
        })?;
        ensure(moment_bound > 0.0 && moment_bound.is_finite(), || {
            format!("K must be positive, got {moment_bound}")
        })?;
        Ok(Self {
            beta,
            lipschitz,
            interval,
            moment_bound,
        })
    }
}

/// A validated service-time distribution with an optional smoothness class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceDist {
    #[serde(flatten)]
    family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    holder: Option<HolderClass>,
    #[serde(skip)]
    cum_weights: Vec<f64>,
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

impl ServiceDist {
    pub fn new(family: Family) -> Result<Self> {
        let p = |ok: bool, msg: &str| ensure(ok, || msg.to_string());
        match &family {
            Family::Exponential { rate } => p(*rate > 0.0 && rate.is_finite(), "rate must be positive")?,
            Family::Gamma { shape, rate } => {
                p(*shape > 0.0 && shape.is_finite(), "shape must be positive")?;
                p(*rate > 0.0 && rate.is_finite(), "rate must be positive")?;
            }
            Family::Weibull { shape, scale } => {
                p(*shape > 0.0 && shape.is_finite(), "shape must be positive")?;
                p(*scale > 0.0 && scale.is_finite(), "scale must be positive")?;
            }
            Family::Uniform { a, b } => {
                p(*a >= 0.0 && a < b && b.is_finite(), "uniform needs 0 <= a < b < inf")?
            }
            Family::LogNormal { mu, sigma } => {
                p(mu.is_finite(), "mu must be finite")?;
                p(*sigma > 0.0 && sigma.is_finite(), "sigma must be positive")?;
            }
            Family::DiracMixture { atoms, weights } => {
                p(!atoms.is_empty(), "mixture needs at least one atom")?;
                p(atoms.len() == weights.len(), "atoms and weights differ in length")?;
                p(atoms.iter().all(|a| *a > 0.0 && a.is_finite()), "atoms must be positive")?;
                p(weights.iter().all(|w| *w >= 0.0), "weights must be nonnegative")?;
                let s: f64 = weights.iter().sum();
                p((s - 1.0).abs() < 1e-9, "weights must sum to 1")?;
            }
        }
        let mut d = Self {
            family,
            holder: None,
            cum_weights: Vec::new(),
        };
        if let Family::DiracMixture { weights, .. } = &d.family {
            let mut acc = 0.0;
            d.cum_weights = weights
                .iter()
                .map(|w| {
                    acc += w;
                    acc
                })
                .collect();
        }
        let m = d.mean();
        if !m.is_finite() {
            return Err(Error::InfiniteMean);
        }
        ensure(m > 0.0, || "mean service time must be positive".into())?;
        Ok(d)
    }

    /// Attaches a smoothness class; `K` must dominate the second moment.
    pub fn with_holder(mut self, class: HolderClass) -> Result<Self> {
        let m2 = self.second_moment()?;
        if m2 > class.moment_bound {
            return Err(Error::InvalidParameter(format!(
                "second moment {m2} exceeds K = {}",
                class.moment_bound
            )));
        }
        self.holder = Some(class);
        Ok(self)
    }

    /// Re-validates after deserialisation.
    pub fn validated(self) -> Result<Self> {
        let holder = self.holder;
        let d = Self::new(self.family)?;
        match holder {
            Some(h) => d.with_holder(h),
            None => Ok(d),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn holder(&self) -> Option<&HolderClass> {
        self.holder.as_ref()
    }

    pub fn mean(&self) -> f64 {
        match &self.family {
            Family::Exponential { rate } => 1.0 / rate,
            Family::Gamma { shape, rate } => shape / rate,
            Family::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
            Family::Uniform { a, b } => 0.5 * (a + b),
            Family::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Family::DiracMixture { atoms, weights } => {
                atoms.iter().zip(weights).map(|(a, w)| a * w).sum()
            }
        }
    }

    /// Service rate `μ = 1 / E[σ]`.
    pub fn rate(&self) -> f64 {
        1.0 / self.mean()
    }

    pub fn second_moment(&self) -> Result<f64> {
        let m2 = match &self.family {
            Family::Exponential { rate } => 2.0 / (rate * rate),
            Family::Gamma { shape, rate } => shape * (shape + 1.0) / (rate * rate),
            Family::Weibull { shape, scale } => scale * scale * gamma(1.0 + 2.0 / shape),
            Family::Uniform { a, b } => (a * a + a * b + b * b) / 3.0,
            Family::LogNormal { mu, sigma } => (2.0 * mu + 2.0 * sigma * sigma).exp(),
            Family::DiracMixture { atoms, weights } => {
                atoms.iter().zip(weights).map(|(a, w)| a * a * w).sum()
            }
        };
        if m2.is_finite() {
            Ok(m2)
        } else {
            Err(Error::DivergentMoment { order: 2 })
        }
    }

    /// `G(t) = P(σ ≤ t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::Exponential { rate } => -(-rate * t).exp_m1(),
            Family::Gamma { shape, rate } => {
                if t == 0.0 {
                    0.0
                } else {
                    gamma_lr(*shape, rate * t)
                }
            }
            Family::Weibull { shape, scale } => -(-(t / scale).powf(*shape)).exp_m1(),
            Family::Uniform { a, b } => ((t - a) / (b - a)).clamp(0.0, 1.0),
            Family::LogNormal { mu, sigma } => {
                if t == 0.0 {
                    0.0
                } else {
                    norm_cdf((t.ln() - mu) / sigma)
                }
            }
            Family::DiracMixture { atoms, weights } => atoms
                .iter()
                .zip(weights)
                .filter(|(a, _)| **a <= t)
                .map(|(_, w)| w)
                .sum(),
        }
    }

    /// `1 − G(t)`, computed without cancellation where the family allows.
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        match &self.family {
            Family::Exponential { rate } => (-rate * t).exp(),
            Family::Gamma { shape, rate } => {
                if t == 0.0 {
                    1.0
                } else {
                    gamma_ur(*shape, rate * t)
                }
            }
            Family::Weibull { shape, scale } => (-(t / scale).powf(*shape)).exp(),
            Family::LogNormal { mu, sigma } => {
                if t == 0.0 {
                    1.0
                } else {
                    norm_cdf(-(t.ln() - mu) / sigma)
                }
            }
            _ => 1.0 - self.cdf(t),
        }
    }

    /// `E[(σ − t)_+] = ∫_t^∞ (1 − G)` for `t ≥ 0`.
    pub fn integrated_tail(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        if t == 0.0 {
            return self.mean();
        }
        match &self.family {
            Family::Exponential { rate } => (-rate * t).exp() / rate,
            Family::Gamma { shape, rate } => {
                let x = rate * t;
                (shape / rate * gamma_ur(shape + 1.0, x) - t * gamma_ur(*shape, x)).max(0.0)
            }
            Family::Weibull { shape, scale } => {
                let z = (t / scale).powf(*shape);
                scale * gamma(1.0 + 1.0 / shape) * gamma_ur(1.0 / shape, z)
            }
            Family::Uniform { a, b } => {
                if t <= *a {
                    (a - t) + 0.5 * (b - a)
                } else if t < *b {
                    (b - t) * (b - t) / (2.0 * (b - a))
                } else {
                    0.0
                }
            }
            Family::LogNormal { mu, sigma } => {
                let d1 = (mu + sigma * sigma - t.ln()) / sigma;
                let d2 = d1 - sigma;
                let v = (mu + 0.5 * sigma * sigma).exp() * norm_cdf(d1) - t * norm_cdf(d2);
                v.max(0.0)
            }
            Family::DiracMixture { atoms, weights } => atoms
                .iter()
                .zip(weights)
                .map(|(a, w)| w * (a - t).max(0.0))
                .sum(),
        }
    }

    /// Correlation function `H(t)`; even in `t`, `H(0) = 1`.
    pub fn correlation_h(&self, t: f64) -> f64 {
        (self.integrated_tail(t.abs()) / self.mean()).clamp(0.0, 1.0)
    }

    /// Right end of the support, if finite.
    fn support_max(&self) -> Option<f64> {
        match &self.family {
            Family::Uniform { b, .. } => Some(*b),
            Family::DiracMixture { atoms, .. } => atoms.iter().cloned().reduce(f64::max),
            _ => None,
        }
    }

    /// Quantile of the stationary-excess law `G*(t) = 1 − H(t)`.
    pub fn excess_quantile(&self, u: f64) -> f64 {
        let target = 1.0 - u;
        if let Family::Exponential { rate } = self.family {
            return -(target.max(f64::MIN_POSITIVE)).ln() / rate;
        }
        if target >= 1.0 {
            return 0.0;
        }
        let hi0 = self.support_max().unwrap_or(self.mean());
        quad::invert_decreasing(|t| self.correlation_h(t) - target, 0.0, hi0, 1e-10)
    }

    pub fn sample_service<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.family {
            Family::Exponential { rate } => Exp::new(*rate).expect("validated").sample(rng),
            Family::Gamma { shape, rate } => {
                Gamma::new(*shape, 1.0 / rate).expect("validated").sample(rng)
            }
            Family::Weibull { shape, scale } => {
                Weibull::new(*scale, *shape).expect("validated").sample(rng)
            }
            Family::Uniform { a, b } => rng.random_range(*a..*b),
            Family::LogNormal { mu, sigma } => {
                LogNormal::new(*mu, *sigma).expect("validated").sample(rng)
            }
            Family::DiracMixture { atoms, .. } => {
                let u: f64 = rng.random::<f64>() * self.cum_weights.last().copied().unwrap_or(1.0);
                let i = self.cum_weights.partition_point(|c| *c <= u).min(atoms.len() - 1);
                atoms[i]
            }
        }
    }

    /// Draws from the stationary-excess law with density `(1 − G)/E[σ]`.
    pub fn sample_residual<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.family {
            Family::Exponential { rate } => Exp::new(*rate).expect("validated").sample(rng),
            _ => {
                let u: f64 = rng.random();
                self.excess_quantile(u)
            }
        }
    }
}
