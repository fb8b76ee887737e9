//! Exact simulation of a stationary M/G/∞ queue observed on a regular grid.

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::dists::ServiceDist;
use crate::error::{ensure, Error, Result};
use crate::rng::rng_from_seed;

/// Sampling grid `t_i = i δ`, `i = 1..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub delta: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(delta: f64, n: usize) -> Result<Self> {
        ensure(delta > 0.0 && delta.is_finite(), || format!("delta must be positive, got {delta}"))?;
        ensure(n >= 1, || "need at least one sample".to_string())?;
        Ok(Self { delta, n })
    }

    /// Observation horizon `T = n δ`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }

    /// Time of the `i`-th sample (0-based), i.e. `(i + 1) δ`.
    pub fn time(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub epoch: f64,
    pub kind: EventKind,
}

/// A simulated path: every event in `(0, T]` plus the gridded counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub horizon: f64,
    pub initial_count: u64,
    pub events: Vec<Event>,
    pub grid: GridSpec,
    pub samples: Vec<u64>,
}

impl PathRecord {
    pub fn arrivals(&self) -> usize {
        self.events.iter().filter(|e| e.kind == EventKind::Arrival).count()
    }

    pub fn departures(&self) -> usize {
        self.events.iter().filter(|e| e.kind == EventKind::Departure).count()
    }

    pub fn samples_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&x| x as f64).collect()
    }
}

struct RawPath {
    initial_count: u64,
    arrivals: Vec<f64>,
    departures: Vec<f64>,
}

fn validate(lambda: f64) -> Result<()> {
    ensure(lambda > 0.0 && lambda.is_finite(), || format!("lambda must be positive, got {lambda}"))
}

fn draw<R: Rng>(d: &ServiceDist, lambda: f64, horizon: f64, rng: &mut R) -> RawPath {
    let rho = lambda * d.mean();
    let initial_count = Poisson::new(rho).expect("rho > 0").sample(rng) as u64;
    let mut departures = Vec::with_capacity((2.0 * lambda * horizon) as usize + 16);
    for _ in 0..initial_count {
        let r = d.sample_residual(rng);
        if r <= horizon {
            departures.push(r);
        }
    }
    let gap = Exp::new(lambda).expect("lambda > 0");
    let mut arrivals = Vec::with_capacity((lambda * horizon) as usize + 16);
    let mut t = 0.0;
    loop {
        t += gap.sample(rng);
        if t > horizon {
            break;
        }
        let s = d.sample_service(rng);
        arrivals.push(t);
        if t + s <= horizon {
            departures.push(t + s);
        }
    }
    RawPath {
        initial_count,
        arrivals,
        departures,
    }
}

/// Index of the first grid point `(i + 1) δ` at or after `epoch`.
fn first_index(epoch: f64, grid: &GridSpec) -> usize {
    let mut i = ((epoch / grid.delta).ceil() as i64 - 1).max(0) as usize;
    if grid.time(i) < epoch {
        i += 1;
    }
    while i > 0 && grid.time(i - 1) >= epoch {
        i -= 1;
    }
    i
}

fn count_on_grid<'a>(
    initial: u64,
    arrivals: impl Iterator<Item = &'a f64>,
    departures: impl Iterator<Item = &'a f64>,
    grid: &GridSpec,
) -> Vec<u64> {
    let mut diff = vec![0i64; grid.n + 1];
    for &a in arrivals {
        diff[first_index(a, grid).min(grid.n)] += 1;
    }
    for &b in departures {
        diff[first_index(b, grid).min(grid.n)] -= 1;
    }
    let mut level = initial as i64;
    diff[..grid.n]
        .iter()
        .map(|d| {
            level += d;
            level as u64
        })
        .collect()
}

/// Simulates a stationary path on `(0, nδ]` and records every event.
pub fn simulate(d: &ServiceDist, lambda: f64, grid: GridSpec, seed: u64) -> Result<PathRecord> {
    validate(lambda)?;
    let mut rng = rng_from_seed(seed);
    let horizon = grid.horizon();
    let raw = draw(d, lambda, horizon, &mut rng);
    let samples = count_on_grid(raw.initial_count, raw.arrivals.iter(), raw.departures.iter(), &grid);
    let mut events: Vec<Event> = raw
        .arrivals
        .iter()
        .map(|&epoch| Event {
            epoch,
            kind: EventKind::Arrival,
        })
        .chain(raw.departures.iter().map(|&epoch| Event {
            epoch,
            kind: EventKind::Departure,
        }))
        .collect();
    events.sort_by(|a, b| a.epoch.total_cmp(&b.epoch));
    Ok(PathRecord {
        horizon,
        initial_count: raw.initial_count,
        events,
        grid,
        samples,
    })
}

/// Same path as [`simulate`] with the same seed, returning only the samples.
pub fn simulate_samples(d: &ServiceDist, lambda: f64, grid: GridSpec, seed: u64) -> Result<Vec<u64>> {
    validate(lambda)?;
    let mut rng = rng_from_seed(seed);
    let raw = draw(d, lambda, grid.horizon(), &mut rng);
    Ok(count_on_grid(raw.initial_count, raw.arrivals.iter(), raw.departures.iter(), &grid))
}

/// Re-samples a recorded path on another grid within its horizon.
pub fn resample(path: &PathRecord, grid: GridSpec) -> Result<Vec<u64>> {
    let t = grid.horizon();
    if t > path.horizon * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "grid horizon",
            value: t,
            lo: 0.0,
            hi: path.horizon,
        });
    }
    let pick = |k: EventKind| {
        path.events
            .iter()
            .filter(move |e| e.kind == k)
            .map(|e| &e.epoch)
    };
    Ok(count_on_grid(
        path.initial_count,
        pick(EventKind::Arrival),
        pick(EventKind::Departure),
        &grid,
    ))
}
