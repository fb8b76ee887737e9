use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Discrete, Poisson};

use crate::dists::{Family, ServiceDist};
use crate::harness::montecarlo::{empirical_mgf, replicate};
use crate::moments;
use crate::rng::{derive_seed, rng_from_seed};
use crate::sim::{simulate_samples, GridSpec};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    /// `statistic ≤ threshold`, or `≥` for p-values.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub seed: u64,
    pub rows: Vec<OracleRow>,
}

impl OracleTable {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

fn at_most(name: &str, statistic: f64, threshold: f64) -> OracleRow {
    OracleRow {
        name: name.into(),
        statistic,
        threshold,
        passed: statistic <= threshold,
    }
}

fn at_least(name: &str, statistic: f64, threshold: f64) -> OracleRow {
    OracleRow {
        name: name.into(),
        statistic,
        threshold,
        passed: statistic >= threshold,
    }
}

/// Nonincreasing `H` with `H[0] = 1`.
pub(crate) fn random_h<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(len);
    let mut v = 1.0;
    h.push(v);
    for _ in 1..len {
        v *= rng.random::<f64>();
        h.push(v);
    }
    h
}

fn mgf_four_identity(seed: u64) -> OracleRow {
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let h = random_h(&mut rng, 12);
        let rho = rng.random_range(0.05..5.0);
        let mut idx = [0usize; 4];
        for v in &mut idx {
            *v = rng.random_range(0..12);
        }
        idx.sort_unstable();
        let theta: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
        let mut full = vec![0.0; idx[3] + 1];
        for (t, &i) in theta.iter().zip(&idx) {
            full[i] += t;
        }
        // Coinciding indices merge into one variable.
        if idx.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let a = moments::log_mgf(&h, rho, &full);
        let b = moments::log_mgf_four(&h, rho, theta, idx);
        worst = worst.max((a - b).abs());
    }
    at_most("mgf_four_identity", worst, 1e-12)
}

fn exponential(rate: f64) -> ServiceDist {
    ServiceDist::new(Family::Exponential { rate }).expect("valid rate")
}

fn poisson_marginal(seed: u64) -> OracleRow {
    let (lambda, d) = (2.0, exponential(1.0));
    let rho = lambda / d.rate();
    let grid = GridSpec::new(1.0, 1).expect("grid");
    let reps = 100_000;
    let xs = replicate(reps, seed, 0, |s| simulate_samples(&d, lambda, grid, s).map(|x| x[0]));
    let pois = Poisson::new(rho).expect("rho > 0");
    let top = 25usize;
    let mut observed = vec![0.0; top + 1];
    for x in xs.into_iter().flatten() {
        observed[(x as usize).min(top)] += 1.0;
    }
    let mut expected: Vec<f64> = (0..top).map(|k| reps as f64 * pois.pmf(k as u64)).collect();
    expected.push(reps as f64 - expected.iter().sum::<f64>());
    at_least("poisson_marginal_p_value", stats::chi_square_p_value(&observed, &expected), 1e-3)
}

fn moment_vs_difference(seed: u64) -> OracleRow {
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let h = random_h(&mut rng, 6);
        let rho = rng.random_range(0.2..3.0);
        let idx: [usize; 3] = std::array::from_fn(|_| rng.random_range(0..6));
        let m = moments::mixed_moment3(&h, rho, idx[0], idx[1], idx[2]);
        let fd = third_mixed_difference(&h, rho, idx, 0.02);
        worst = worst.max((fd - m).abs() / m.abs());
    }
    at_most("moment3_vs_mgf_differences", worst, 1e-4)
}

/// Richardson-extrapolated central differences of `exp(log_mgf)` in the
/// directions `e_{idx[0]}, e_{idx[1]}, e_{idx[2]}` at zero.
pub(crate) fn third_mixed_difference(h: &[f64], rho: f64, idx: [usize; 3], step: f64) -> f64 {
    let len = idx.iter().max().unwrap() + 1;
    let f = |s: &[f64; 3]| {
        let mut theta = vec![0.0; len];
        for (k, &i) in idx.iter().enumerate() {
            theta[i] += s[k];
        }
        moments::log_mgf(h, rho, &theta).exp()
    };
    let cd = |e: f64| {
        let mut acc = 0.0;
        for mask in 0..8u32 {
            let s: [f64; 3] = std::array::from_fn(|k| if mask >> k & 1 == 1 { e } else { -e });
            let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * f(&s);
        }
        acc / (8.0 * e * e * e)
    };
    // Error terms are even in the step: O(e²) + O(e⁴).
    let (a, b, c) = (cd(step), cd(step / 2.0), cd(step / 4.0));
    let r1 = (4.0 * b - a) / 3.0;
    let r2 = (4.0 * c - b) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

fn degenerate_moments() -> OracleRow {
    let h = [1.0, 0.4, 0.1];
    let mut worst: f64 = 0.0;
    for rho in [0.3, 1.0, 2.5] {
        let m3 = moments::mixed_moment3(&h, rho, 1, 1, 1);
        let m4 = moments::mixed_moment4(&h, rho, 2, 2, 2, 2);
        let p3 = rho.powi(3) + 3.0 * rho * rho + rho;
        let p4 = rho.powi(4) + 6.0 * rho.powi(3) + 7.0 * rho * rho + rho;
        worst = worst.max((m3 - p3).abs()).max((m4 - p4).abs());
    }
    at_most("degenerate_poisson_moments", worst, 1e-12)
}

fn mgf_vs_simulation(seed: u64) -> OracleRow {
    let d = exponential(1.0);
    let lambda = 1.0;
    let grid = GridSpec::new(0.5, 3).expect("grid");
    let theta = [0.2, -0.1, 0.25];
    let h = moments::h_sequence(&d, &grid);
    let want = moments::log_mgf(&h, lambda, &theta).exp();
    match empirical_mgf(&d, lambda, grid.delta, &theta, 100_000, seed, 1) {
        Ok(m) => at_most("mgf_vs_simulation_z", m.z(want), 4.0),
        Err(_) => at_most("mgf_vs_simulation_z", f64::INFINITY, 4.0),
    }
}

fn lag_covariance(seed: u64) -> OracleRow {
    let d = exponential(1.0);
    let lambda = 3.0;
    let grid = GridSpec::new(0.5, 2).expect("grid");
    let pairs = replicate(100_000, seed, 2, |s| simulate_samples(&d, lambda, grid, s));
    let prods: Vec<f64> = pairs
        .into_iter()
        .flatten()
        .map(|x| (x[0] as f64 - lambda) * (x[1] as f64 - lambda))
        .collect();
    let want = lambda * d.correlation_h(0.5);
    let se = (stats::variance(&prods) / prods.len() as f64).sqrt();
    at_most("lag_covariance_z", (stats::mean(&prods) - want).abs() / se, 4.0)
}

/// Runs every oracle check; failures are reported as rows, not errors.
pub fn run_oracle_suite(seed: u64) -> OracleTable {
    let s = |i| derive_seed(seed, 1000, i);
    OracleTable {
        seed,
        rows: vec![
            mgf_four_identity(s(0)),
            degenerate_moments(),
            moment_vs_difference(s(1)),
            poisson_marginal(s(2)),
            mgf_vs_simulation(s(3)),
            lag_covariance(s(4)),
        ],
    }
}
