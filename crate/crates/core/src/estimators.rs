//! Estimators of `G(x0)`, `λ` and `γ'(x0)`, their bandwidth rules and
//! risk bounds.

use serde::{Deserialize, Serialize};

use crate::covest;
use crate::dists::HolderClass;
use crate::error::{Error, Result};
use crate::lpweights::{self, Segment, WeightSet};
use crate::sim::{GridSpec, PathRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub x0: f64,
    pub ell: usize,
    pub bandwidth: Bandwidth,
    /// Known arrival rate; required for `Ĝ`.
    pub lambda: Option<f64>,
    pub kappa: f64,
    pub holder: Option<HolderClass>,
}

impl EstimatorConfig {
    pub fn new(x0: f64, ell: usize) -> Self {
        Self {
            x0,
            ell,
            bandwidth: Bandwidth::Auto,
            lambda: None,
            kappa: 0.5,
            holder: None,
        }
    }

    pub fn with_bandwidth(mut self, h: f64) -> Self {
        self.bandwidth = Bandwidth::Fixed(h);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_holder(mut self, holder: HolderClass, kappa: f64) -> Self {
        self.holder = Some(holder);
        self.kappa = kappa;
        self
    }

    fn class_for_auto(&self) -> Result<HolderClass> {
        let class = self
            .holder
            .ok_or_else(|| Error::InvalidParameter("automatic bandwidth needs a smoothness class".into()))?;
        let min_ell = class.beta.floor() as usize + 1;
        if self.ell < min_ell {
            return Err(Error::InvalidParameter(format!(
                "automatic bandwidth needs ell >= floor(beta) + 1 = {min_ell}, got {}",
                self.ell
            )));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::InvalidParameter(format!("kappa must lie in (0, 1), got {}", self.kappa)));
        }
        Ok(class)
    }

    fn lambda(&self) -> Result<f64> {
        match self.lambda {
            Some(l) if l > 0.0 && l.is_finite() => Ok(l),
            Some(l) => Err(Error::InvalidParameter(format!("lambda must be positive, got {l}"))),
            None => Err(Error::InvalidParameter("arrival rate lambda is required".into())),
        }
    }
}

fn sqrt_k_or_1(k: f64) -> f64 {
    k * k.sqrt().max(1.0)
}

/// `[K(√K∨1)(1+1/λ)/(L²κT)]^{1/(2β+2)}`.
pub fn bandwidth_star_g(class: &HolderClass, lambda: f64, kappa: f64, horizon: f64) -> f64 {
    let l = class.lipschitz;
    (sqrt_k_or_1(class.moment_bound) * (1.0 + 1.0 / lambda) / (l * l * kappa * horizon))
        .powf(1.0 / (2.0 * class.beta + 2.0))
}

/// `[K(√K∨1)/(L²T)]^{1/(2β+2)}`.
pub fn bandwidth_star_lambda(class: &HolderClass, horizon: f64) -> f64 {
    let l = class.lipschitz;
    (sqrt_k_or_1(class.moment_bound) / (l * l * horizon)).powf(1.0 / (2.0 * class.beta + 2.0))
}

/// `[K/(L²κT)]^{1/(2β+2)}`, with `K` bounding `∫|γ|`.
pub fn bandwidth_star_theta(class: &HolderClass, kappa: f64, horizon: f64) -> f64 {
    let l = class.lipschitz;
    (class.moment_bound / (l * l * kappa * horizon)).powf(1.0 / (2.0 * class.beta + 2.0))
}

fn lipschitz_pow(class: &HolderClass) -> f64 {
    class.lipschitz.powf(1.0 / (class.beta + 1.0))
}

/// Risk bound for `Ĝ` at the optimal bandwidth, up to the constant `c`.
pub fn theorem_bound_g(class: &HolderClass, lambda: f64, kappa: f64, horizon: f64, c: f64) -> f64 {
    let b = class.beta;
    c * lipschitz_pow(class)
        * (sqrt_k_or_1(class.moment_bound) * (1.0 + 1.0 / lambda) / (kappa * horizon))
            .powf(b / (2.0 * b + 2.0))
}

/// Risk bound for `λ̂` at the optimal bandwidth, up to the constant `c`.
pub fn theorem_bound_lambda(class: &HolderClass, lambda: f64, horizon: f64, c: f64) -> f64 {
    let b = class.beta;
    c * lipschitz_pow(class)
        * (lambda * lambda + lambda).sqrt()
        * (sqrt_k_or_1(class.moment_bound) / horizon).powf(b / (2.0 * b + 2.0))
}

/// Risk bound for `θ̂` at the optimal bandwidth, up to the constant `c`.
pub fn theorem_bound_theta(class: &HolderClass, kappa: f64, horizon: f64, c: f64) -> f64 {
    let b = class.beta;
    c * lipschitz_pow(class) * (class.moment_bound / (kappa * horizon)).powf(b / (2.0 * b + 2.0))
}

/// Risk bound `K x0^{-2}` of the trivial estimate `1`.
pub fn trivial_bound(k: f64, x0: f64) -> f64 {
    if x0 == 0.0 {
        f64::INFINITY
    } else {
        k / (x0 * x0)
    }
}

/// Bias bound `C₂ λ L h^β`.
pub fn bias_bound(c2: f64, lambda: f64, lipschitz: f64, h: f64, beta: f64) -> f64 {
    c2 * lambda * lipschitz * h.powf(beta)
}

/// Output of a covariance-based estimator together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub h_used: f64,
    pub window: Segment,
    pub weights_norm: f64,
    pub n_weights: usize,
    pub warnings: Vec<String>,
}

impl Estimate {
    /// The estimate clipped to `[0, 1]` for use as a probability.
    pub fn clipped(&self) -> f64 {
        self.estimate.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    G,
    Lambda,
    Theta,
}

fn resolve_h(cfg: &EstimatorConfig, target: Target, grid: &GridSpec, warnings: &mut Vec<String>) -> Result<f64> {
    let t = grid.horizon();
    let h = match cfg.bandwidth {
        Bandwidth::Fixed(h) => h,
        Bandwidth::Auto => {
            let class = cfg.class_for_auto()?;
            match target {
                Target::G => bandwidth_star_g(&class, cfg.lambda()?, cfg.kappa, t),
                Target::Lambda => bandwidth_star_lambda(&class, t),
                Target::Theta => bandwidth_star_theta(&class, cfg.kappa, t),
            }
        }
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("window width must be positive, got {h}")));
    }
    if let Some(class) = cfg.holder {
        let (a, b) = class.interval;
        let (lo, hi) = match target {
            Target::Lambda => (0.0, 2.0 * h),
            _ => (cfg.x0 - h, cfg.x0 + h),
        };
        if lo < a - 1e-12 || hi > b + 1e-12 {
            warnings.push(format!(
                "window [{lo}, {hi}] leaves the smoothness interval [{a}, {b}] (T below the theorem range)"
            ));
        }
        if target != Target::Lambda && b > (1.0 - cfg.kappa) * t {
            warnings.push(format!("interval end {b} exceeds (1 - kappa) T = {}", (1.0 - cfg.kappa) * t));
        }
    }
    Ok(h)
}

fn weights_for(cfg: &EstimatorConfig, target: Target, grid: &GridSpec) -> Result<(WeightSet, Vec<String>)> {
    let mut warnings = Vec::new();
    let h = resolve_h(cfg, target, grid, &mut warnings)?;
    let x = if target == Target::Lambda { 0.0 } else { cfg.x0 };
    if target == Target::Theta && x <= 0.0 {
        return Err(Error::OutOfRange {
            what: "x0",
            value: x,
            lo: 0.0,
            hi: grid.horizon() - grid.delta,
        });
    }
    let seg = lpweights::segment(x, h, grid.horizon(), grid.delta)?;
    let w = lpweights::solve_weights(x, &seg, grid, cfg.ell)?;
    warnings.extend(w.warnings.iter().cloned());
    Ok((w, warnings))
}

fn weighted_covariance(samples: &[f64], w: &WeightSet, centered: bool) -> Result<f64> {
    if w.max_lag() >= samples.len() {
        return Err(Error::LagOutOfRange {
            lag: w.max_lag(),
            n: samples.len(),
        });
    }
    let r = covest::r_hat_lags(samples, w.indices.iter().copied(), centered)?;
    Ok(w.weights.iter().zip(&r).map(|(a, r)| a * r).sum())
}

fn package(estimate: f64, w: &WeightSet, warnings: Vec<String>) -> Estimate {
    Estimate {
        estimate,
        h_used: w.segment.half_width(),
        window: w.segment,
        weights_norm: w.l2_norm(),
        n_weights: w.len(),
        warnings,
    }
}

/// Weights used by [`estimate_g`] for this configuration and grid.
pub fn g_weights(cfg: &EstimatorConfig, grid: &GridSpec) -> Result<WeightSet> {
    weights_for(cfg, Target::G, grid).map(|(w, _)| w)
}

/// Weights used by [`estimate_lambda`].
pub fn lambda_weights(cfg: &EstimatorConfig, grid: &GridSpec) -> Result<WeightSet> {
    weights_for(cfg, Target::Lambda, grid).map(|(w, _)| w)
}

/// Weights used by [`estimate_theta`].
pub fn theta_weights(cfg: &EstimatorConfig, grid: &GridSpec) -> Result<WeightSet> {
    weights_for(cfg, Target::Theta, grid).map(|(w, _)| w)
}

/// `1 + (1/λ) Σ a_k R_k` for supplied lag covariances `r[k]`.
pub fn g_from_covariances(w: &WeightSet, r: &[f64], lambda: f64) -> Result<f64> {
    Ok(1.0 + lpweights::apply_weights(w, r)? / lambda)
}

/// `−Σ a_k(0) R_k` for supplied lag covariances.
pub fn lambda_from_covariances(w: &WeightSet, r: &[f64]) -> Result<f64> {
    Ok(-lpweights::apply_weights(w, r)?)
}

/// `Ĝ_h(x0)`, unclipped.
pub fn estimate_g(samples: &[f64], cfg: &EstimatorConfig, grid: &GridSpec) -> Result<Estimate> {
    let lambda = cfg.lambda()?;
    let (w, warnings) = weights_for(cfg, Target::G, grid)?;
    let s = weighted_covariance(samples, &w, true)?;
    Ok(package(1.0 + s / lambda, &w, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedEstimate {
    pub estimate: f64,
    pub used_trivial: bool,
    pub trivial_bound: f64,
    pub theorem_bound: f64,
    pub inner: Option<Estimate>,
}

/// Returns `1` when `K x0^{-2}` is below the risk bound of `Ĝ`, else `Ĝ`.
pub fn estimate_g_combined(
    samples: &[f64],
    cfg: &EstimatorConfig,
    grid: &GridSpec,
    c: f64,
) -> Result<CombinedEstimate> {
    let class = cfg
        .holder
        .ok_or_else(|| Error::InvalidParameter("combined estimator needs a smoothness class".into()))?;
    let lambda = cfg.lambda()?;
    let trivial = trivial_bound(class.moment_bound, cfg.x0);
    let theorem = theorem_bound_g(&class, lambda, cfg.kappa, grid.horizon(), c);
    if trivial < theorem {
        return Ok(CombinedEstimate {
            estimate: 1.0,
            used_trivial: true,
            trivial_bound: trivial,
            theorem_bound: theorem,
            inner: None,
        });
    }
    let inner = estimate_g(samples, cfg, grid)?;
    Ok(CombinedEstimate {
        estimate: inner.estimate,
        used_trivial: false,
        trivial_bound: trivial,
        theorem_bound: theorem,
        inner: Some(inner),
    })
}

/// `λ̂ = −Σ a_k(0) R̂_k` on the window `[0, 2h]`.
pub fn estimate_lambda(samples: &[f64], cfg: &EstimatorConfig, grid: &GridSpec) -> Result<Estimate> {
    let (w, warnings) = weights_for(cfg, Target::Lambda, grid)?;
    let s = weighted_covariance(samples, &w, true)?;
    Ok(package(-s, &w, warnings))
}

/// `θ̂_h = Σ a_k(x0) R̂_k` with uncentred covariances (zero-mean input).
pub fn estimate_theta(samples: &[f64], cfg: &EstimatorConfig, grid: &GridSpec) -> Result<Estimate> {
    let (w, warnings) = weights_for(cfg, Target::Theta, grid)?;
    let s = weighted_covariance(samples, &w, false)?;
    Ok(package(s, &w, warnings))
}

/// `(λ̂↑, λ̂↓)`: arrivals and departures in `(0, T]` divided by `T`.
pub fn estimate_lambda_counting(path: &PathRecord) -> (f64, f64) {
    (
        path.arrivals() as f64 / path.horizon,
        path.departures() as f64 / path.horizon,
    )
}

/// Exact mean squared error `λ/T` of either counting estimator.
pub fn counting_mse(lambda: f64, horizon: f64) -> f64 {
    lambda / horizon
}
