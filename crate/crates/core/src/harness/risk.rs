use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{self, EstimatorConfig};
use crate::gauss::CirculantSampler;
use crate::harness::montecarlo::replicate;
use crate::harness::spec::{ExperimentSpec, Source, TargetKind};
use crate::rng::rng_from_seed;
use crate::sim::{simulate, simulate_samples, GridSpec};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungReport {
    pub horizon: f64,
    pub delta: f64,
    pub n: usize,
    /// Window half-width (NaN for counting estimators).
    pub h: f64,
    pub rmse: f64,
    /// Monte Carlo standard error of `rmse`.
    pub se: f64,
    /// Risk bound with the configured constant (NaN without a class).
    pub bound: f64,
    pub mean_error: f64,
    pub replicates: usize,
    pub failures: usize,
    /// Replicates answered by the trivial estimator.
    pub trivial: usize,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub target: TargetKind,
    pub truth: f64,
    pub rungs: Vec<RungReport>,
    /// Least-squares slope of `log rmse` on `log T`.
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    pub intercept: Option<f64>,
    pub warnings: Vec<String>,
}

impl RiskReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("t,delta,h,rmse,se,bound\n");
        for r in &self.rungs {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.horizon, r.delta, r.h, r.rmse, r.se, r.bound);
        }
        out
    }

    /// Writes `<stem>.csv` and `<stem>.json`.
    pub fn write(&self, stem: &Path) -> Result<()> {
        if let Some(dir) = stem.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(stem.with_extension("csv"), self.csv())?;
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(stem.with_extension("json"), json)?;
        Ok(())
    }
}

struct Draw {
    estimate: f64,
    h: f64,
    trivial: bool,
    warnings: Vec<String>,
}

impl Draw {
    fn plain(estimate: f64) -> Self {
        Self {
            estimate,
            h: f64::NAN,
            trivial: false,
            warnings: Vec::new(),
        }
    }

    fn from_estimate(e: estimators::Estimate) -> Self {
        Self {
            estimate: e.estimate,
            h: e.h_used,
            trivial: false,
            warnings: e.warnings,
        }
    }
}

fn truth(spec: &ExperimentSpec) -> f64 {
    match (&spec.source, spec.target) {
        (Source::Queue { dist, .. }, TargetKind::G) => dist.cdf(spec.estimator.x0),
        (Source::Queue { lambda, .. }, _) => *lambda,
        (Source::Gaussian { covariance }, _) => covariance.derivative(spec.estimator.x0),
    }
}

fn bound(spec: &ExperimentSpec, horizon: f64) -> f64 {
    let c = spec.estimator.bound_constant;
    let kappa = spec.estimator.kappa;
    let lambda = match spec.source {
        Source::Queue { lambda, .. } => lambda,
        Source::Gaussian { .. } => f64::NAN,
    };
    match (spec.target, spec.holder) {
        (TargetKind::LambdaUp | TargetKind::LambdaDown, _) => (lambda / horizon).sqrt(),
        (_, None) => f64::NAN,
        (TargetKind::G, Some(h)) => estimators::theorem_bound_g(&h, lambda, kappa, horizon, c),
        (TargetKind::Lambda, Some(h)) => estimators::theorem_bound_lambda(&h, lambda, horizon, c),
        (TargetKind::Theta, Some(h)) => estimators::theorem_bound_theta(&h, kappa, horizon, c),
    }
}

fn one_draw(
    spec: &ExperimentSpec,
    cfg: &EstimatorConfig,
    grid: GridSpec,
    sampler: Option<&CirculantSampler>,
    seed: u64,
) -> Result<Draw> {
    match (&spec.source, spec.target) {
        (Source::Queue { lambda, dist }, TargetKind::LambdaUp | TargetKind::LambdaDown) => {
            let path = simulate(dist, *lambda, grid, seed)?;
            let (up, down) = estimators::estimate_lambda_counting(&path);
            Ok(Draw::plain(if spec.target == TargetKind::LambdaUp { up } else { down }))
        }
        (Source::Queue { lambda, dist }, target) => {
            let x: Vec<f64> = simulate_samples(dist, *lambda, grid, seed)?
                .into_iter()
                .map(|v| v as f64)
                .collect();
            if target == TargetKind::Lambda {
                return estimators::estimate_lambda(&x, cfg, &grid).map(Draw::from_estimate);
            }
            if spec.estimator.trivial_crossover {
                let c = estimators::estimate_g_combined(&x, cfg, &grid, spec.estimator.bound_constant)?;
                Ok(match c.inner {
                    Some(inner) => Draw::from_estimate(inner),
                    None => Draw {
                        estimate: c.estimate,
                        h: f64::NAN,
                        trivial: true,
                        warnings: Vec::new(),
                    },
                })
            } else {
                estimators::estimate_g(&x, cfg, &grid).map(Draw::from_estimate)
            }
        }
        (Source::Gaussian { .. }, _) => {
            let sampler = sampler.expect("gaussian rung without sampler");
            let x = sampler.sample(&mut rng_from_seed(seed));
            estimators::estimate_theta(&x, cfg, &grid).map(Draw::from_estimate)
        }
    }
}

/// Runs every rung of `spec` and fits the log-log rate.
pub fn run_risk(spec: &ExperimentSpec) -> Result<RiskReport> {
    let mut spec = spec.clone();
    spec.validate()?;
    let cfg = spec.estimator_config();
    let truth = truth(&spec);
    let mut rungs = Vec::with_capacity(spec.ladder.len());
    let mut warnings = Vec::new();
    for (index, rung) in spec.ladder.iter().enumerate() {
        let grid = GridSpec::new(rung.delta, rung.n)?;
        let sampler = match &spec.source {
            Source::Gaussian { covariance } => {
                Some(CirculantSampler::new(&covariance.lags(grid.delta, grid.n + 1), grid.n)?)
            }
            Source::Queue { .. } => None,
        };
        let draws = replicate(spec.replicates, spec.master_seed, index as u64, |seed| {
            one_draw(&spec, &cfg, grid, sampler.as_ref(), seed)
        });
        rungs.push(summarize(&spec, grid, truth, draws, &mut warnings));
    }
    let fit: Vec<&RungReport> = rungs
        .iter()
        .filter(|r| r.aborted.is_none() && r.rmse > 0.0 && r.rmse.is_finite())
        .collect();
    let (slope, slope_se, intercept) = if fit.len() >= 2 {
        let x: Vec<f64> = fit.iter().map(|r| r.horizon.ln()).collect();
        let y: Vec<f64> = fit.iter().map(|r| r.rmse.ln()).collect();
        let (b, a, se) = stats::ols_slope(&x, &y);
        (Some(b), Some(se), Some(a))
    } else {
        (None, None, None)
    };
    let report = RiskReport {
        target: spec.target,
        truth,
        rungs,
        slope,
        slope_se,
        intercept,
        warnings,
    };
    if let Some(stem) = &spec.output {
        report.write(stem)?;
    }
    Ok(report)
}

fn summarize(
    spec: &ExperimentSpec,
    grid: GridSpec,
    truth: f64,
    draws: Vec<Result<Draw>>,
    warnings: &mut Vec<String>,
) -> RungReport {
    let replicates = draws.len();
    let mut errors = Vec::with_capacity(replicates);
    let mut failures = 0;
    let mut first_failure = None;
    let mut h = f64::NAN;
    let mut trivial = 0;
    for d in draws {
        match d {
            Ok(d) => {
                if h.is_nan() && !d.h.is_nan() {
                    h = d.h;
                    for w in &d.warnings {
                        let line = format!("T={}: {w}", grid.horizon());
                        if !warnings.contains(&line) {
                            warnings.push(line);
                        }
                    }
                }
                trivial += d.trivial as usize;
                errors.push(d.estimate - truth);
            }
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let horizon = grid.horizon();
    let mut report = RungReport {
        horizon,
        delta: grid.delta,
        n: grid.n,
        h,
        rmse: f64::NAN,
        se: f64::NAN,
        bound: bound(spec, horizon),
        mean_error: f64::NAN,
        replicates,
        failures,
        trivial,
        aborted: None,
    };
    if failures * 100 > replicates || errors.len() < 2 {
        report.aborted = Some(
            Error::RungAborted {
                failures,
                replicates,
                first: first_failure.unwrap_or_default(),
            }
            .to_string(),
        );
        return report;
    }
    let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let mse = stats::mean(&sq);
    let rmse = mse.sqrt();
    let se_mse = (stats::variance(&sq) / sq.len() as f64).sqrt();
    report.rmse = rmse;
    report.se = if rmse > 0.0 { se_mse / (2.0 * rmse) } else { 0.0 };
    report.mean_error = stats::mean(&errors);
    report
}
