use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mginf_core::dists::{HolderClass, ServiceDist};
use mginf_core::estimators::{self, EstimatorConfig};
use mginf_core::gauss::pair::calibrate;
use mginf_core::gauss::{build_pair, kl_toeplitz_gaussian, two_point_risk_floor, LowerBoundParams, PairConstants};
use mginf_core::harness::{run_oracle_suite, run_risk, ExperimentSpec};
use mginf_core::sim::{simulate, EventKind, GridSpec};

#[derive(Parser)]
#[command(name = "mginf", version, about = "Service-time inference for the M/G/infinity queue")]
struct Cli {
    /// Default directory for written files.
    #[arg(long, global = true, env = "MGINF_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a stationary path and write its events and samples.
    Simulate(SimulateArgs),
    /// Estimate G(x0) from a samples file.
    EstimateG(EstimateArgs),
    /// Estimate the arrival rate from a samples file.
    EstimateLambda(EstimateArgs),
    /// Estimate the covariance derivative at x0 from zero-mean samples.
    EstimateTheta(EstimateArgs),
    /// Run a Monte Carlo risk experiment from a TOML config.
    Risk(RiskArgs),
    /// Build the two-point lower-bound pair and report its divergence.
    LowerBound(LowerBoundArgs),
    /// Run the moment and simulation oracle checks.
    OracleCheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Inline TOML table, e.g. `family = "exponential", rate = 1.0`.
    #[arg(long)]
    dist: String,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output stem; `<stem>_events.csv` and `<stem>_samples.csv` are written.
    #[arg(long, default_value = "path")]
    out: String,
}

#[derive(Args)]
struct EstimateArgs {
    /// Single-column CSV of samples (a non-numeric header line is skipped).
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 3)]
    ell: usize,
    #[arg(long, conflicts_with = "auto_h")]
    h: Option<f64>,
    #[arg(long)]
    auto_h: bool,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "L")]
    lipschitz: Option<f64>,
    #[arg(long = "K")]
    moment_bound: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
    /// Smoothness interval `lo,hi`; defaults to `[0, 2 x0]` (or `[0, 1]` at x0 = 0).
    #[arg(long, value_delimiter = ',', num_args = 2)]
    interval: Option<Vec<f64>>,
    /// Clip a G estimate to [0, 1].
    #[arg(long)]
    clip: bool,
}

#[derive(Args)]
struct RiskArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output stem overriding the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerBoundArgs {
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long = "L", default_value_t = 1.0)]
    lipschitz: f64,
    #[arg(long = "K", default_value_t = 1.0)]
    moment_bound: f64,
    #[arg(long, default_value_t = 1.0)]
    x0: f64,
    #[arg(long, default_value_t = 0.5)]
    d: f64,
    #[arg(long, default_value_t = 0.0625)]
    delta: f64,
    #[arg(long = "T", default_value_t = 4096.0)]
    horizon: f64,
    /// Constants; any missing value triggers calibration.
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    /// Defaults to the largest value admissible at `T`.
    #[arg(long)]
    c21: Option<f64>,
    /// Write f0, f1, gamma0 and gamma1 as CSV under this stem.
    #[arg(long)]
    dump: Option<String>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Simulate(a) => simulate_cmd(&a, &cli.out_dir)?,
        Command::EstimateG(a) => estimate_cmd(&a, Target::G)?,
        Command::EstimateLambda(a) => estimate_cmd(&a, Target::Lambda)?,
        Command::EstimateTheta(a) => estimate_cmd(&a, Target::Theta)?,
        Command::Risk(a) => risk_cmd(&a, &cli.out_dir)?,
        Command::LowerBound(a) => lower_bound_cmd(&a, &cli.out_dir)?,
        Command::OracleCheck { seed } => {
            let table = run_oracle_suite(seed);
            let passed = table.all_passed();
            println!("{}", serde_json::to_string_pretty(&table)?);
            if !passed {
                std::process::exit(1);
            }
            return Ok(());
        }
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn parse_dist(text: &str) -> Result<ServiceDist> {
    let table: toml::Table = format!("d = {{ {text} }}").parse().context("parsing --dist")?;
    let d: ServiceDist = table["d"].clone().try_into().context("parsing --dist")?;
    Ok(d.validated()?)
}

fn simulate_cmd(a: &SimulateArgs, dir: &Path) -> Result<serde_json::Value> {
    let d = parse_dist(&a.dist)?;
    let grid = GridSpec::new(a.delta, a.n)?;
    let path = simulate(&d, a.lambda, grid, a.seed)?;
    fs::create_dir_all(dir)?;
    let events_path = dir.join(format!("{}_events.csv", a.out));
    let samples_path = dir.join(format!("{}_samples.csv", a.out));
    let header = json!({
        "seed": a.seed,
        "rho": a.lambda / d.rate(),
        "grid": { "delta": grid.delta, "n": grid.n, "horizon": grid.horizon() },
        "initial_count": path.initial_count,
    });
    let mut ev = std::io::BufWriter::new(fs::File::create(&events_path)?);
    writeln!(ev, "{header}")?;
    writeln!(ev, "epoch,kind")?;
    for e in &path.events {
        let kind = match e.kind {
            EventKind::Arrival => "arrival",
            EventKind::Departure => "departure",
        };
        writeln!(ev, "{},{kind}", e.epoch)?;
    }
    ev.flush()?;
    let mut s = String::from("x\n");
    for x in &path.samples {
        s.push_str(&format!("{x}\n"));
    }
    fs::write(&samples_path, s)?;
    Ok(json!({
        "events": events_path,
        "samples": samples_path,
        "arrivals": path.arrivals(),
        "departures": path.departures(),
    }))
}

fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Target {
    G,
    Lambda,
    Theta,
}

fn estimate_cmd(a: &EstimateArgs, target: Target) -> Result<serde_json::Value> {
    let samples = read_samples(&a.samples)?;
    let grid = GridSpec::new(a.delta, samples.len())?;
    let mut cfg = EstimatorConfig::new(a.x0, a.ell);
    cfg.kappa = a.kappa;
    if let Some(l) = a.lambda {
        cfg = cfg.with_lambda(l);
    }
    if let (Some(beta), Some(l), Some(k)) = (a.beta, a.lipschitz, a.moment_bound) {
        let interval = match &a.interval {
            Some(v) => (v[0], v[1]),
            None if a.x0 > 0.0 => (0.0, 2.0 * a.x0),
            None => (0.0, 1.0),
        };
        cfg = cfg.with_holder(HolderClass::new(beta, l, interval, k)?, a.kappa);
    }
    match (a.h, a.auto_h) {
        (Some(h), _) => cfg = cfg.with_bandwidth(h),
        (None, true) => {}
        (None, false) => bail!("give --h or --auto-h"),
    }
    let est = match target {
        Target::G => estimators::estimate_g(&samples, &cfg, &grid)?,
        Target::Lambda => estimators::estimate_lambda(&samples, &cfg, &grid)?,
        Target::Theta => estimators::estimate_theta(&samples, &cfg, &grid)?,
    };
    let value = if a.clip && target == Target::G { est.clipped() } else { est.estimate };
    Ok(json!({
        "estimate": value,
        "h_used": est.h_used,
        "window": [est.window.lo, est.window.hi],
        "weights_norm": est.weights_norm,
        "warnings": est.warnings,
    }))
}

fn risk_cmd(a: &RiskArgs, dir: &Path) -> Result<serde_json::Value> {
    let mut spec = ExperimentSpec::from_file(&a.config)?;
    if let Some(out) = &a.out {
        spec.output = Some(out.clone());
    }
    let stem = match &spec.output {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => dir.join(p),
        None => dir.join(a.config.file_stem().unwrap_or_default()),
    };
    spec.output = Some(stem);
    let report = run_risk(&spec)?;
    Ok(serde_json::to_value(&report)?)
}

fn lower_bound_cmd(a: &LowerBoundArgs, dir: &Path) -> Result<serde_json::Value> {
    let params = LowerBoundParams::new(a.beta, a.lipschitz, a.moment_bound, a.x0, a.d, a.delta, a.horizon);
    let c21 = a.c21.unwrap_or_else(|| params.c21_for_horizon(a.horizon, 0.8));
    let constants = match (a.c0, a.c1, a.c3) {
        (Some(c0), Some(c1), Some(c3)) => PairConstants { c0, c1, c3, c21 },
        _ => calibrate(params, c21, 0.5)?.constants,
    };
    let pair = build_pair(params, constants)?;
    let kl = kl_toeplitz_gaussian(&pair.gamma0, &pair.gamma1, pair.n_samples)?;
    let floor = two_point_risk_floor(&pair, pair.n_samples)?;
    if let Some(stem) = &a.dump {
        fs::create_dir_all(dir)?;
        let mut spec = String::from("omega,f0,f1\n");
        for (j, (f0, f1)) in pair.f0.values.iter().zip(&pair.f1.values).enumerate() {
            spec.push_str(&format!("{},{f0},{f1}\n", pair.f0.omega(j)));
        }
        fs::write(dir.join(format!("{stem}_spectra.csv")), spec)?;
        let mut cov = String::from("t,gamma0,gamma1\n");
        for (k, (g0, g1)) in pair.gamma0.iter().zip(&pair.gamma1).enumerate() {
            cov.push_str(&format!("{},{g0},{g1}\n", k as f64 * a.delta));
        }
        fs::write(dir.join(format!("{stem}_covariances.csv")), cov)?;
    }
    Ok(json!({
        "N": pair.n_freq,
        "a": pair.a,
        "a_numeric": pair.a_numeric,
        "KL": kl,
        "risk_floor": floor,
        "f1_min": pair.f1_min,
        "constants": constants,
    }))
}
