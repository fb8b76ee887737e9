//! Kullback–Leibler divergence between zero-mean stationary Gaussian
//! vectors, `½[log det Σ₀ − log det Σ₁ − n + tr(Σ₀⁻¹Σ₁)]`.

use nalgebra::DMatrix;
use rustfft::{num_complex::Complex64, FftPlanner};

use crate::error::{Error, Result};
use crate::gauss::pair::CovariancePair;

/// Above this size the Toeplitz structure is exploited instead of dense
/// factorisation.
pub const DENSE_KL_LIMIT: usize = 1024;

fn check(gamma0: &[f64], gamma1: &[f64], n: usize) -> Result<()> {
    if n == 0 || gamma0.len() < n || gamma1.len() < n {
        return Err(Error::InvalidParameter(format!(
            "need {n} lags, got {} and {}",
            gamma0.len(),
            gamma1.len()
        )));
    }
    Ok(())
}

/// Dense Cholesky evaluation.
pub fn kl_dense(gamma0: &[f64], gamma1: &[f64], n: usize) -> Result<f64> {
    check(gamma0, gamma1, n)?;
    let s0 = DMatrix::from_fn(n, n, |i, j| gamma0[i.abs_diff(j)]);
    let v = DMatrix::from_fn(n, n, |i, j| gamma1[i.abs_diff(j)] - gamma0[i.abs_diff(j)]);
    let s1 = &s0 + &v;
    let c0 = s0.cholesky().ok_or(Error::Singular)?;
    let c1 = s1.cholesky().ok_or(Error::Singular)?;
    let logdet = |c: &nalgebra::Cholesky<f64, nalgebra::Dyn>| {
        2.0 * c.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    };
    let trace = c0.solve(&v).trace();
    Ok(0.5 * (logdet(&c0) - logdet(&c1) + trace))
}

struct Durbin {
    logdet: f64,
    /// First column of the inverse.
    inv_col: Vec<f64>,
}

/// Durbin recursion on a symmetric positive-definite Toeplitz matrix.
fn durbin(r: &[f64], n: usize, want_inverse: bool) -> Result<Durbin> {
    if !(r[0] > 0.0) {
        return Err(Error::Singular);
    }
    let mut a = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    a[0] = 1.0;
    let mut e = r[0];
    let mut logdet = e.ln();
    for k in 1..n {
        // acc = Σ_{j<k} a_j r_{k−j}
        let mut acc = 0.0;
        for (aj, rj) in a[..k].iter().zip(r[1..=k].iter().rev()) {
            acc += aj * rj;
        }
        let kappa = -acc / e;
        tmp[..=k].copy_from_slice(&a[..=k]);
        for j in 1..=k {
            a[j] += kappa * tmp[k - j];
        }
        e *= 1.0 - kappa * kappa;
        if !(e > 0.0) {
            return Err(Error::Singular);
        }
        logdet += e.ln();
    }
    let inv_col = if want_inverse {
        a.iter().map(|v| v / e).collect()
    } else {
        Vec::new()
    };
    Ok(Durbin { logdet, inv_col })
}

/// `corr(u, v)[k] = Σ_p u_p v_{p+k}` for `k = 0..n`.
fn correlate(u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = u.len();
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut fu: Vec<Complex64> = (0..m).map(|i| Complex64::new(if i < n { u[i] } else { 0.0 }, 0.0)).collect();
    let mut fv: Vec<Complex64> = (0..m).map(|i| Complex64::new(if i < n { v[i] } else { 0.0 }, 0.0)).collect();
    fwd.process(&mut fu);
    fwd.process(&mut fv);
    let mut prod: Vec<Complex64> = fu.iter().zip(&fv).map(|(a, b)| a.conj() * b).collect();
    inv.process(&mut prod);
    prod[..n].iter().map(|z| z.re / m as f64).collect()
}

/// `tr(L(v) L(v)ᵀ T(c))` for lower-triangular Toeplitz `L(v)`.
fn trace_lower_product(v: &[f64], c: &[f64]) -> f64 {
    let n = v.len();
    let c1 = correlate(v, v);
    let weighted: Vec<f64> = v.iter().enumerate().map(|(p, x)| p as f64 * x).collect();
    let c2 = correlate(&weighted, v);
    let mut total = 0.0;
    for k in 0..n {
        if c[k] == 0.0 {
            continue;
        }
        let s = (n - k) as f64 * c1[k] - c2[k];
        total += if k == 0 { c[0] * s } else { 2.0 * c[k] * s };
    }
    total
}

/// `O(n²)` evaluation: log-determinants from the Durbin recursion and the
/// trace term from the Gohberg–Semencul form of `Σ₀⁻¹`.
pub fn kl_levinson(gamma0: &[f64], gamma1: &[f64], n: usize) -> Result<f64> {
    check(gamma0, gamma1, n)?;
    let d0 = durbin(gamma0, n, true)?;
    let d1 = durbin(gamma1, n, false)?;
    let x = &d0.inv_col;
    let diff: Vec<f64> = (0..n).map(|k| gamma1[k] - gamma0[k]).collect();
    let mut shifted = vec![0.0; n];
    for i in 1..n {
        shifted[i] = x[n - i];
    }
    let trace = (trace_lower_product(x, &diff) - trace_lower_product(&shifted, &diff)) / x[0];
    Ok(0.5 * (d0.logdet - d1.logdet + trace))
}

/// KL divergence of `N(0, T_n(γ₁))` from `N(0, T_n(γ₀))`.
pub fn kl_toeplitz_gaussian(gamma0: &[f64], gamma1: &[f64], n: usize) -> Result<f64> {
    let kl = if n <= DENSE_KL_LIMIT {
        kl_dense(gamma0, gamma1, n)?
    } else {
        kl_levinson(gamma0, gamma1, n)?
    };
    Ok(kl.max(0.0))
}

/// `(a²/16) exp(−KL)`.
pub fn risk_floor(a: f64, kl: f64) -> f64 {
    a * a / 16.0 * (-kl).exp()
}

/// Two-point lower bound on the squared risk for the pair's first `n` samples.
pub fn two_point_risk_floor(pair: &CovariancePair, n: usize) -> Result<f64> {
    let kl = kl_toeplitz_gaussian(&pair.gamma0, &pair.gamma1, n)?;
    Ok(risk_floor(pair.a, kl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_case() {
        let kl = kl_toeplitz_gaussian(&[1.0], &[2.0], 1).unwrap();
        assert!((kl - 0.5 * (-(2f64.ln()) - 1.0 + 2.0)).abs() < 1e-15);
        assert!((kl - 0.15343).abs() < 1e-5);
    }

    #[test]
    fn identical_is_zero() {
        let g: Vec<f64> = (0..50).map(|k| (-0.2 * k as f64).exp()).collect();
        assert_eq!(kl_toeplitz_gaussian(&g, &g, 50).unwrap(), 0.0);
        assert!(kl_levinson(&g, &g, 50).unwrap().abs() < 1e-12);
    }

    #[test]
    fn singular_rejected() {
        let g = vec![1.0; 10];
        let h: Vec<f64> = (0..10).map(|k| (-0.5 * k as f64).exp()).collect();
        assert!(matches!(kl_dense(&h, &g, 10), Err(Error::Singular)));
    }

    #[test]
    fn levinson_matches_dense() {
        let n = 300;
        let g0: Vec<f64> = (0..n).map(|k| (-0.05 * k as f64).exp() + if k == 0 { 0.3 } else { 0.0 }).collect();
        let g1: Vec<f64> = (0..n)
            .map(|k| g0[k] + 0.05 * (-0.1 * k as f64).exp() * (0.7 * k as f64).cos())
            .collect();
        let a = kl_dense(&g0, &g1, n).unwrap();
        let b = kl_levinson(&g0, &g1, n).unwrap();
        assert!((a - b).abs() < 1e-9 * a.max(1e-3), "{a} vs {b}");
    }

    #[test]
    fn floor_monotone() {
        assert_eq!(risk_floor(2.0, 0.0), 0.25);
        assert!(risk_floor(2.0, 0.5) > risk_floor(2.0, 0.6));
    }

    proptest! {
        #[test]
        fn nonnegative(rates in proptest::array::uniform2(0.05f64..2.0), w in 0.0f64..3.0, amp in 0.0f64..0.5) {
            let n = 40;
            let g0: Vec<f64> = (0..n).map(|k| (-rates[0] * k as f64).exp()).collect();
            let g1: Vec<f64> = (0..n)
                .map(|k| (-rates[1] * k as f64).exp() * (1.0 + amp * (w * k as f64).cos()) / (1.0 + amp))
                .collect();
            if let Ok(kl) = kl_toeplitz_gaussian(&g0, &g1, n) {
                prop_assert!(kl >= 0.0);
                let lev = kl_levinson(&g0, &g1, n).unwrap();
                prop_assert!((lev - kl).abs() < 1e-8 * kl.max(1.0));
            }
        }
    }
}
