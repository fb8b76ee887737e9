//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line on
//! stderr (uncaptured) and then asserts.

use std::io::Write;

use rand::Rng;
use statrs::distribution::{Discrete, Poisson};

use mginf_core::dists::{Family, HolderClass, ServiceDist};
use mginf_core::estimators;
use mginf_core::gauss::pair::calibrate;
use mginf_core::gauss::{build_pair, kl_toeplitz_gaussian, two_point_risk_floor, CovarianceFamily, LowerBoundParams};
use mginf_core::harness::{empirical_mgf, replicate, run_risk, EstimatorSpec, ExperimentSpec, Rung, Source, TargetKind};
use mginf_core::lpweights::{segment, solve_weights, SegmentCase};
use mginf_core::moments;
use mginf_core::rng::rng_from_seed;
use mginf_core::sim::{simulate_samples, GridSpec};
use mginf_core::{covest, stats};

const SEED: u64 = 2024;

fn report(criterion: u32, passed: bool, detail: String) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {criterion:>2}: {verdict}  {detail}");
}

fn exponential(rate: f64) -> ServiceDist {
    ServiceDist::new(Family::Exponential { rate }).unwrap()
}

fn random_h<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut h = vec![1.0];
    for _ in 1..len {
        let last = *h.last().unwrap();
        h.push(last * rng.random::<f64>());
    }
    h
}

#[test]
fn criterion_01_weight_exactness() {
    let mut rng = rng_from_seed(SEED);
    let mut worst: f64 = 0.0;
    let mut configs = 0;
    while configs < 500 {
        let ell = rng.random_range(1..=5usize);
        let delta = rng.random_range(0.01..0.5);
        let n = rng.random_range(200..2000usize);
        let grid = GridSpec::new(delta, n).unwrap();
        let top = grid.horizon() - delta;
        let h_min = (ell as f64 + 2.0) * delta / 2.0 * 1.001;
        let h_max = (top / 2.0).min(h_min * 20.0);
        let h = rng.random_range(h_min..h_max);
        let x = rng.random_range(0.0..top);
        let seg = segment(x, h, grid.horizon(), delta).unwrap();
        let w = solve_weights(x, &seg, &grid, ell).unwrap();
        for j in 0..=ell as i32 {
            let lhs: f64 = w.iter().map(|(k, a)| a * (k as f64 * delta).powi(j)).sum();
            let rhs = if j == 0 { 0.0 } else { j as f64 * x.powi(j - 1) };
            worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        }
        configs += 1;
    }
    let ok = worst <= 1e-8;
    report(1, ok, format!("max relative error {worst:.2e} over {configs} configurations (tol 1e-8)"));
    assert!(ok);
}

#[test]
fn criterion_02_mgf_four_identity() {
    let mut rng = rng_from_seed(SEED + 2);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let h = random_h(&mut rng, 4);
        let rho = rng.random_range(0.01..10.0);
        let theta: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let a = moments::log_mgf(&h, rho, &theta);
        let b = moments::log_mgf_four(&h, rho, theta, [0, 1, 2, 3]);
        worst = worst.max((a - b).abs());
    }
    let ok = worst <= 1e-12;
    report(2, ok, format!("max |log_mgf - expansion| = {worst:.2e} over 10^4 draws (tol 1e-12)"));
    assert!(ok);
}

#[test]
fn criterion_03_mgf_vs_simulation() {
    let mut rng = rng_from_seed(SEED + 3);
    let d = exponential(1.0);
    let delta = 0.5;
    let mut worst: f64 = 0.0;
    let mut stream = 0;
    for n in 2..=4usize {
        for lambda in [0.5, 2.0] {
            let theta: Vec<f64> = (0..n).map(|_| rng.random_range(-0.3..0.3)).collect();
            let grid = GridSpec::new(delta, n).unwrap();
            let h = moments::h_sequence(&d, &grid);
            let want = moments::log_mgf(&h, lambda, &theta).exp();
            let m = empirical_mgf(&d, lambda, delta, &theta, 1_000_000, SEED, stream).unwrap();
            stream += 1;
            worst = worst.max(m.z(want));
        }
    }
    let ok = worst <= 4.0;
    report(3, ok, format!("max deviation {worst:.2} SE over 6 settings (tol 4 SE)"));
    assert!(ok);
}

/// Mixed central difference of `exp(log_mgf)` in the coordinates `idx`
/// with two Richardson steps.
fn mixed_difference(h: &[f64], rho: f64, idx: &[usize], step: f64) -> f64 {
    let len = idx.iter().max().unwrap() + 1;
    let order = idx.len() as u32;
    let cd = |e: f64| {
        let mut acc = 0.0;
        for mask in 0..(1u32 << order) {
            let mut theta = vec![0.0; len];
            for (k, &i) in idx.iter().enumerate() {
                theta[i] += if mask >> k & 1 == 1 { e } else { -e };
            }
            let sign = if (order - mask.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * moments::log_mgf(h, rho, &theta).exp();
        }
        acc / ((1u32 << order) as f64 * e.powi(order as i32))
    };
    let (a, b, c) = (cd(step), cd(step / 2.0), cd(step / 4.0));
    let r1 = (4.0 * b - a) / 3.0;
    let r2 = (4.0 * c - b) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

#[test]
fn criterion_04_moment_oracles() {
    let d = exponential(1.0);
    let lambda = 1.5;
    let grid = GridSpec::new(0.5, 4).unwrap();
    let h = moments::h_sequence(&d, &grid);
    let rho = lambda / d.rate();
    let triples: [[usize; 3]; 3] = [[0, 1, 3], [0, 0, 2], [1, 2, 3]];
    let quads: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 0, 1, 3], [0, 2, 2, 3]];

    let mut fd_worst: f64 = 0.0;
    for t in &triples {
        let m = moments::mixed_moment3(&h, rho, t[0], t[1], t[2]);
        fd_worst = fd_worst.max((mixed_difference(&h, rho, t, 0.02) - m).abs() / m);
    }
    for q in &quads {
        let m = moments::mixed_moment4(&h, rho, q[0], q[1], q[2], q[3]);
        fd_worst = fd_worst.max((mixed_difference(&h, rho, q, 0.02) - m).abs() / m);
    }

    let products = replicate(1_000_000, SEED, 40, |seed| {
        let x: Vec<f64> = simulate_samples(&d, lambda, grid, seed)
            .unwrap()
            .into_iter()
            .map(|v| v as f64)
            .collect();
        let mut out = Vec::with_capacity(6);
        out.extend(triples.iter().map(|t| x[t[0]] * x[t[1]] * x[t[2]]));
        out.extend(quads.iter().map(|q| x[q[0]] * x[q[1]] * x[q[2]] * x[q[3]]));
        out
    });
    let oracle: Vec<f64> = triples
        .iter()
        .map(|t| moments::mixed_moment3(&h, rho, t[0], t[1], t[2]))
        .chain(quads.iter().map(|q| moments::mixed_moment4(&h, rho, q[0], q[1], q[2], q[3])))
        .collect();
    let mut z_worst: f64 = 0.0;
    for (c, want) in oracle.iter().enumerate() {
        let col: Vec<f64> = products.iter().map(|p| p[c]).collect();
        let se = (stats::variance(&col) / col.len() as f64).sqrt();
        z_worst = z_worst.max((stats::mean(&col) - want).abs() / se);
    }

    let mut degenerate_worst: f64 = 0.0;
    for rho in [0.2f64, 1.0, 3.7] {
        let p3 = rho.powi(3) + 3.0 * rho * rho + rho;
        let p4 = rho.powi(4) + 6.0 * rho.powi(3) + 7.0 * rho * rho + rho;
        let m3 = moments::mixed_moment3(&h, rho, 2, 2, 2);
        let m4 = moments::mixed_moment4(&h, rho, 1, 1, 1, 1);
        degenerate_worst = degenerate_worst.max(((m3 - p3) / p3).abs()).max(((m4 - p4) / p4).abs());
    }

    let ok = fd_worst <= 1e-4 && z_worst <= 4.0 && degenerate_worst <= 1e-14;
    report(
        4,
        ok,
        format!(
            "differences rel {fd_worst:.2e} (tol 1e-4), simulation {z_worst:.2} SE (tol 4), \
             degenerate rel {degenerate_worst:.1e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_05_poisson_marginal() {
    let reps = 100_000;
    let grid = GridSpec::new(1.0, 1).unwrap();
    let mut min_p: f64 = 1.0;
    for (stream, (lambda, mu)) in [(1.0, 1.0), (5.0, 1.0), (2.0, 4.0)].into_iter().enumerate() {
        let d = exponential(mu);
        let rho = lambda / mu;
        let xs = replicate(reps, SEED, 50 + stream as u64, |s| simulate_samples(&d, lambda, grid, s).unwrap()[0]);
        let pois = Poisson::new(rho).unwrap();
        let top = 40usize;
        let mut observed = vec![0.0; top + 1];
        for x in xs {
            observed[(x as usize).min(top)] += 1.0;
        }
        let mut expected: Vec<f64> = (0..top).map(|k| reps as f64 * pois.pmf(k as u64)).collect();
        expected.push(reps as f64 - expected.iter().sum::<f64>());
        min_p = min_p.min(stats::chi_square_p_value(&observed, &expected));
    }
    let ok = min_p > 1e-3;
    report(5, ok, format!("smallest chi-square p-value {min_p:.4} over 3 settings (level 0.001)"));
    assert!(ok);
}

#[test]
fn criterion_06_covariance_consistency() {
    let lambda = 1.0;
    let grid = GridSpec::new(0.5, 1 << 17).unwrap();
    let lags: Vec<usize> = (0..=20).collect();
    let mut worst: f64 = 0.0;
    for (stream, d) in [exponential(1.0), ServiceDist::new(Family::Uniform { a: 0.0, b: 1.0 }).unwrap()]
        .into_iter()
        .enumerate()
    {
        let rho = lambda / d.rate();
        let r = replicate(10_000, SEED, 60 + stream as u64, |s| {
            let x: Vec<f64> = simulate_samples(&d, lambda, grid, s)
                .unwrap()
                .into_iter()
                .map(|v| v as f64)
                .collect();
            covest::r_hat_lags(&x, lags.iter().copied(), true).unwrap()
        });
        for &k in &lags {
            let col: Vec<f64> = r.iter().map(|v| v[k]).collect();
            let se = (stats::variance(&col) / col.len() as f64).sqrt();
            let want = rho * d.correlation_h(k as f64 * grid.delta);
            worst = worst.max((stats::mean(&col) - want).abs() / se);
        }
    }
    let ok = worst <= 3.0;
    report(6, ok, format!("max |mean R_k - rho H(k delta)| = {worst:.2} SE, k <= 20 (tol 3)"));
    assert!(ok);
}

fn rate_spec(target: TargetKind, source: Source) -> ExperimentSpec {
    ExperimentSpec {
        target,
        source,
        estimator: EstimatorSpec {
            x0: 1.0,
            ell: 3,
            h: None,
            kappa: 0.5,
            trivial_crossover: false,
            bound_constant: 1.0,
        },
        holder: Some(HolderClass::new(2.0, 1.0, (0.5, 1.5), 2.0).unwrap()),
        ladder: (9..=13).map(|p| Rung { delta: 0.125, n: 8 << p }).collect(),
        replicates: 200,
        master_seed: SEED,
        output: None,
    }
}

fn queue() -> Source {
    Source::Queue {
        lambda: 1.0,
        dist: exponential(1.0),
    }
}

#[test]
fn criterion_07_rate_service_distribution() {
    let r = run_risk(&rate_spec(TargetKind::G, queue())).unwrap();
    let slope = r.slope.unwrap();
    let ok = (slope + 1.0 / 3.0).abs() <= 0.15;
    report(7, ok, format!("slope {slope:.3} +- {:.3} (target -1/3 +- 0.15)", r.slope_se.unwrap()));
    assert!(ok);
}

#[test]
fn criterion_08_rate_arrival() {
    let r = run_risk(&rate_spec(TargetKind::Lambda, queue())).unwrap();
    let slope = r.slope.unwrap();
    let up = run_risk(&rate_spec(TargetKind::LambdaUp, queue())).unwrap();
    let up_slope = up.slope.unwrap();
    let mut worst_z: f64 = 0.0;
    for rung in &up.rungs {
        let mse = rung.rmse * rung.rmse;
        let se_mse = 2.0 * rung.rmse * rung.se;
        worst_z = worst_z.max((mse - 1.0 / rung.horizon).abs() / se_mse);
    }
    let ok = (slope + 1.0 / 3.0).abs() <= 0.15 && (up_slope + 0.5).abs() <= 0.1 && worst_z <= 3.0;
    report(
        8,
        ok,
        format!(
            "covariance slope {slope:.3} (target -1/3 +- 0.15), counting slope {up_slope:.3} \
             (target -1/2 +- 0.1), counting MSE vs lambda/T max {worst_z:.2} SE (tol 3)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_rate_gaussian_derivative() {
    let source = Source::Gaussian {
        covariance: CovarianceFamily::Exponential {
            variance: 1.0,
            rate: 1.0,
        },
    };
    let r = run_risk(&rate_spec(TargetKind::Theta, source)).unwrap();
    let slope = r.slope.unwrap();
    let ok = (slope + 1.0 / 3.0).abs() <= 0.15;
    report(9, ok, format!("slope {slope:.3} +- {:.3} (target -1/3 +- 0.15)", r.slope_se.unwrap()));
    assert!(ok);
}

#[test]
fn criterion_10_lower_bound_construction() {
    let base = LowerBoundParams::new(1.0, 1.0, 1.0, 1.0, 0.5, 1.0 / 16.0, 4096.0);
    let horizons = [2048.0, 4096.0, 8192.0];
    let c21 = base.c21_for_horizon(8192.0, 0.8);
    let cal = calibrate(base, c21, 0.5).unwrap();
    let in_class = cal.gamma1_holder <= base.lipschitz && cal.gamma1_l1_bound <= base.k_bound;

    let mut f1_min = f64::INFINITY;
    let mut sep_rel: f64 = 0.0;
    let mut kls = Vec::new();
    let mut floors = Vec::new();
    for &t in &horizons {
        let mut p = base;
        p.horizon = t;
        let pair = build_pair(p, cal.constants).unwrap();
        f1_min = f1_min.min(pair.f1_min);
        sep_rel = sep_rel.max((pair.a - pair.a_numeric).abs() / pair.a);
        kls.push(kl_toeplitz_gaussian(&pair.gamma0, &pair.gamma1, pair.n_samples).unwrap());
        floors.push(two_point_risk_floor(&pair, pair.n_samples).unwrap());
    }
    let kl_ratio = kls.iter().cloned().fold(0.0, f64::max) / kls.iter().cloned().fold(f64::INFINITY, f64::min);
    let x: Vec<f64> = horizons.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = floors.iter().map(|f| f.ln()).collect();
    let (slope, _, _) = stats::ols_slope(&x, &y);
    let ok = f1_min >= -1e-12
        && sep_rel <= 1e-3
        && kl_ratio <= 2.0
        && floors.iter().all(|f| *f > 0.0)
        && (slope + 0.5).abs() <= 0.2
        && in_class;
    report(
        10,
        ok,
        format!(
            "f1 min {f1_min:.2e}, separation rel err {sep_rel:.1e}, KL {kls:.4?} (ratio {kl_ratio:.2}), \
             floor slope {slope:.3} (target -1/2 +- 0.2), c3 {:.3}, in class {in_class}",
            cal.constants.c3
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_11_invariance_suite() {
    let mut rng = rng_from_seed(SEED + 11);
    let mut annihilation_failures = 0;
    let mut scaling_failures = 0;
    let mut segment_failures = 0;
    let mut seen_cases = [false; 3];
    for _ in 0..100 {
        let ell = rng.random_range(1..=5usize);
        let delta = rng.random_range(0.05..0.5);
        let grid = GridSpec::new(delta, rng.random_range(100..400usize)).unwrap();
        let top = grid.horizon() - delta;
        let h_min = (ell as f64 + 2.0) * delta / 2.0 * 1.001;
        let h = rng.random_range(h_min..(top / 2.0).min(4.0 * h_min));
        let x = rng.random_range(0.0..top);
        let seg = segment(x, h, grid.horizon(), delta).unwrap();
        let w = solve_weights(x, &seg, &grid, ell).unwrap();
        let r: Vec<f64> = (0..=w.max_lag()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = rng.random_range(-5.0..5.0);
        let shifted: Vec<f64> = r.iter().map(|v| v + c).collect();
        let lambda = rng.random_range(0.1..10.0);

        let g = estimators::g_from_covariances(&w, &r, lambda).unwrap();
        let g_shift = estimators::g_from_covariances(&w, &shifted, lambda).unwrap();
        let l = estimators::lambda_from_covariances(&w, &r).unwrap();
        let l_shift = estimators::lambda_from_covariances(&w, &shifted).unwrap();
        if (g - g_shift).abs() > 1e-12 || (l - l_shift).abs() > 1e-12 {
            annihilation_failures += 1;
        }

        let s = rng.random_range(0.1..10.0);
        let scaled: Vec<f64> = r.iter().map(|v| v * s).collect();
        let g_scaled = estimators::g_from_covariances(&w, &scaled, lambda * s).unwrap();
        if (g - g_scaled).abs() > 1e-12 {
            scaling_failures += 1;
        }

        let (lo, hi, case) = if x <= h {
            (0.0, 2.0 * h, SegmentCase::Left)
        } else if x <= top - h {
            (x - h, x + h, SegmentCase::Interior)
        } else {
            (top - 2.0 * h, top, SegmentCase::Right)
        };
        // Force each case to appear: reuse the configuration at both ends.
        let mut ok = seg.case == case && (seg.lo - lo).abs() < 1e-12 && (seg.hi - hi).abs() < 1e-12;
        for (xe, want) in [(0.5 * h, SegmentCase::Left), (top - 0.5 * h, SegmentCase::Right)] {
            ok &= segment(xe, h, grid.horizon(), delta).unwrap().case == want;
        }
        seen_cases[case as usize] = true;
        if !ok {
            segment_failures += 1;
        }
    }
    let ok = annihilation_failures == 0 && scaling_failures == 0 && segment_failures == 0;
    report(
        11,
        ok,
        format!(
            "failures over 100 configurations: constants {annihilation_failures}, \
             lambda scaling {scaling_failures}, segments {segment_failures} (cases seen {seen_cases:?})"
        ),
    );
    assert!(ok);
}
