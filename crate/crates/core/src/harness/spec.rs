use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dists::{HolderClass, ServiceDist};
use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::gauss::CovarianceFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// `G(x0)` via the covariance estimator.
    G,
    /// `λ` via the covariance estimator.
    Lambda,
    /// `λ` from the number of arrivals.
    LambdaUp,
    /// `λ` from the number of departures.
    LambdaDown,
    /// `γ'(x0)` of a Gaussian process.
    Theta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Queue { lambda: f64, dist: ServiceDist },
    Gaussian { covariance: CovarianceFamily },
}

fn default_kappa() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default)]
    pub x0: f64,
    pub ell: usize,
    /// Fixed window half-width; the theorem bandwidth is used when absent.
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Replace `Ĝ` by `1` when the trivial bound is smaller.
    #[serde(default)]
    pub trivial_crossover: bool,
    /// Constant `C` of the reported theorem bound.
    #[serde(default = "one")]
    pub bound_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rung {
    pub delta: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub target: TargetKind,
    pub source: Source,
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub holder: Option<HolderClass>,
    pub ladder: Vec<Rung>,
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Output stem; `<stem>.csv` and `<stem>.json` are written.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Checks the spec and fills derived state of nested values.
    pub fn validate(&mut self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.replicates < 2 {
            return bad("replicates must be at least 2");
        }
        if self.ladder.is_empty() {
            return bad("ladder must have at least one rung");
        }
        if let Some(h) = self.holder {
            self.holder = Some(HolderClass::new(h.beta, h.lipschitz, h.interval, h.moment_bound)?);
        }
        match (&mut self.source, self.target) {
            (Source::Queue { lambda, dist }, t) if t != TargetKind::Theta => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return bad("queue source needs lambda > 0");
                }
                *dist = dist.clone().validated()?;
            }
            (Source::Gaussian { covariance }, TargetKind::Theta) => covariance.validate()?,
            _ => return bad("target theta needs a gaussian source; other targets need a queue source"),
        }
        Ok(())
    }

    pub fn estimator_config(&self) -> EstimatorConfig {
        let e = &self.estimator;
        let mut cfg = EstimatorConfig::new(e.x0, e.ell);
        cfg.kappa = e.kappa;
        cfg.holder = self.holder;
        if let Some(h) = e.h {
            cfg = cfg.with_bandwidth(h);
        }
        if let Source::Queue { lambda, .. } = self.source {
            cfg = cfg.with_lambda(lambda);
        }
        cfg
    }
}
