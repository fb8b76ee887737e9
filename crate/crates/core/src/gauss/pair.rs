//! The two covariance hypotheses `(γ₀, γ₁)` behind the minimax lower bound
//! for estimating `γ'(x0)` from gridded Gaussian data.
//!
//! With the pair convention of [`crate::gauss::spectral`], the spectral
//! density `f₀(ω) = c₀δ φ̂(ωδ/π) + c₁[ζ̂(ω−N) + ζ̂(ω+N)]` has covariance
//! `γ₀(t) = (c₀/2) Φ(πt/δ) + 2c₁ ζ(t) cos(Nt)` with `Φ(s) = ∫ φ̂(u) e^{−ius} du`.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::spectral::{zeta_time, PhiHat, SpectralGrid};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub beta: f64,
    pub lipschitz: f64,
    /// Bound `K` on `∫|γ|`.
    pub k_bound: f64,
    pub x0: f64,
    pub d: f64,
    pub delta: f64,
    pub horizon: f64,
    /// Even order `ℓ` of the B-spline `ζ`.
    pub zeta_order: usize,
    pub phi: PhiHat,
}

impl LowerBoundParams {
    pub fn new(beta: f64, lipschitz: f64, k_bound: f64, x0: f64, d: f64, delta: f64, horizon: f64) -> Self {
        Self {
            beta,
            lipschitz,
            k_bound,
            x0,
            d,
            delta,
            horizon,
            zeta_order: 4,
            phi: PhiHat::default(),
        }
    }

    pub fn n_samples(&self) -> usize {
        (self.horizon / self.delta).round() as usize
    }

    /// Half-width `π/(4x0)` of each perturbation band.
    pub fn band_half_width(&self) -> f64 {
        PI / (4.0 * self.x0)
    }

    /// Smoothness interval `[x0 − d, x0 + d]`.
    pub fn interval(&self) -> (f64, f64) {
        (self.x0 - self.d, self.x0 + self.d)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.beta > 0.0 && self.lipschitz > 0.0 && self.k_bound > 0.0) {
            return bad(format!("beta, L, K must be positive: {self:?}"));
        }
        if !(self.d > 0.0 && self.d < self.x0) {
            return bad(format!("need 0 < d < x0, got d={}, x0={}", self.d, self.x0));
        }
        if !(self.delta > 0.0 && self.horizon > 2.0 * self.delta) {
            return bad(format!("need 0 < 2 delta < T, got delta={}, T={}", self.delta, self.horizon));
        }
        if self.zeta_order < 2 || self.zeta_order % 2 != 0 {
            return bad(format!("zeta order must be even and >= 2, got {}", self.zeta_order));
        }
        Ok(())
    }

    /// `N* = c21 (L²T)^{1/(2β+2)}`.
    pub fn n_star(&self, c21: f64) -> f64 {
        c21 * (self.lipschitz.powi(2) * self.horizon).powf(1.0 / (2.0 * self.beta + 2.0))
    }

    /// Integer `N0 ≥ 1` whose `N = (2π/x0)(N0 + ¼)` is nearest to `N*`.
    pub fn n0_for(&self, c21: f64) -> u64 {
        let raw = self.n_star(c21) * self.x0 / (2.0 * PI) - 0.25;
        raw.round().max(1.0) as u64
    }

    /// Largest `c21` keeping `(N* + π/(4x0)) δ ≤ fill · π` at horizon `t_max`.
    pub fn c21_for_horizon(&self, t_max: f64, fill: f64) -> f64 {
        let cap = fill * PI / self.delta - self.band_half_width();
        cap / (self.lipschitz.powi(2) * t_max).powf(1.0 / (2.0 * self.beta + 2.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairConstants {
    pub c0: f64,
    pub c1: f64,
    pub c3: f64,
    pub c21: f64,
}

/// Analytic description of the pair; evaluates densities and covariances
/// at arbitrary points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub params: LowerBoundParams,
    pub constants: PairConstants,
    pub n0: u64,
    pub n_freq: f64,
    pub b_n: f64,
    /// `c₃ L N^{−β} / B_N`.
    pub amplitude: f64,
}

impl Construction {
    pub fn new(params: LowerBoundParams, constants: PairConstants) -> Result<Self> {
        let n0 = params.n0_for(constants.c21);
        Self::with_n0(params, constants, n0)
    }

    pub fn with_n0(params: LowerBoundParams, constants: PairConstants, n0: u64) -> Result<Self> {
        params.validate()?;
        if !(constants.c0 > 0.0 && constants.c1 > 0.0) {
            return Err(Error::InvalidParameter(format!("c0 and c1 must be positive: {constants:?}")));
        }
        let n_freq = 2.0 * PI / params.x0 * (n0 as f64 + 0.25);
        let edge = (n_freq + params.band_half_width()) * params.delta;
        if edge > PI {
            return Err(Error::FrequencyAboveNyquist { value: edge });
        }
        let mut c = Self {
            params,
            constants,
            n0: n0.max(1),
            n_freq,
            b_n: 0.0,
            amplitude: 0.0,
        };
        c.b_n = c.b_n_of(|w| c.f0(w));
        c.amplitude = constants.c3 * params.lipschitz * n_freq.powf(-params.beta) / c.b_n;
        Ok(c)
    }

    fn s(&self) -> f64 {
        self.params.x0 - self.params.d
    }

    pub fn zeta_hat(&self, omega: f64) -> f64 {
        let ell = self.params.zeta_order;
        let s = self.s();
        let z = omega * s / ell as f64;
        let ratio = if z.abs() < 1e-8 { 2.0 * (1.0 - z * z / 6.0) } else { 2.0 * z.sin() / z };
        s / ell as f64 * ratio.powi(ell as i32)
    }

    pub fn zeta_hat_at_zero(&self) -> f64 {
        2f64.powi(self.params.zeta_order as i32) * self.s() / self.params.zeta_order as f64
    }

    /// `φ̂(6x0(ω − N)/π)`, the band selector around `N`.
    fn band(&self, omega: f64) -> f64 {
        let k = 6.0 * self.params.x0 / PI;
        self.params.phi.eval(k * (omega - self.n_freq)) + self.params.phi.eval(k * (omega + self.n_freq))
    }

    pub fn f0(&self, omega: f64) -> f64 {
        let p = &self.params;
        self.constants.c0 * p.delta * p.phi.eval(omega * p.delta / PI)
            + self.constants.c1 * (self.zeta_hat(omega - self.n_freq) + self.zeta_hat(omega + self.n_freq))
    }

    pub fn psi(&self, omega: f64) -> f64 {
        let b = self.band(omega);
        if b == 0.0 {
            0.0
        } else {
            self.f0(omega) * omega * (omega * self.params.x0).sin() * b
        }
    }

    /// `f₁ − f₀`.
    pub fn delta_f(&self, omega: f64) -> f64 {
        let psi = self.psi(omega);
        if psi == 0.0 {
            0.0
        } else {
            self.amplitude * self.f0(omega) * psi
        }
    }

    pub fn f1(&self, omega: f64) -> f64 {
        self.f0(omega) + self.delta_f(omega)
    }

    fn band_limits(&self) -> (f64, f64) {
        let w = self.params.band_half_width();
        (self.n_freq - w, self.n_freq + w)
    }

    /// `B_N(g) = ∫ g² sin²(ωx0) ω² [φ̂(6x0(ω−N)/π) + φ̂(6x0(ω+N)/π)] dω` for even `g`.
    pub fn b_n_of<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let (lo, hi) = self.band_limits();
        let x0 = self.params.x0;
        2.0 * quad::integrate(
            |w| {
                let v = g(w) * (w * x0).sin() * w;
                v * v * self.band(w)
            },
            lo,
            hi,
            0.0,
            1e-14,
        )
    }

    /// Closed-form separation `(c₃/2π) L N^{−β}`.
    pub fn separation(&self) -> f64 {
        self.constants.c3 * self.params.lipschitz * self.n_freq.powf(-self.params.beta) / (2.0 * PI)
    }

    /// `j`-th derivative of `γ₁ − γ₀` at `t`.
    pub fn delta_gamma_derivative(&self, t: f64, j: u32) -> f64 {
        let (lo, hi) = self.band_limits();
        let phase = j as f64 * PI / 2.0;
        let panels = 64 + (t.abs() * (hi - lo) / PI).ceil() as usize;
        quad::gauss_legendre(
            |w| self.delta_f(w) * w.powi(j as i32) * (w * t + phase).cos(),
            lo,
            hi,
            panels,
        ) / PI
    }

    /// `j`-th derivative of `γ₀` at `t ∈ I` (where the `ζ` term vanishes).
    pub fn gamma0_derivative_on_interval(&self, t: f64, j: u32) -> f64 {
        let p = &self.params;
        let k = PI / p.delta;
        0.5 * self.constants.c0 * k.powi(j as i32) * p.phi.transform_derivative(k * t, j)
    }

    /// `γ₀(t)` anywhere.
    pub fn gamma0(&self, t: f64) -> f64 {
        let p = &self.params;
        0.5 * self.constants.c0 * p.phi.transform(PI * t / p.delta)
            + 2.0 * self.constants.c1 * zeta_time(p.zeta_order, self.s(), t) * (self.n_freq * t).cos()
    }

    /// `γ₀(kδ)` for `k = 0..count`.
    pub fn gamma0_lags(&self, count: usize) -> Vec<f64> {
        let p = &self.params;
        let phi = p.phi.transform_at_integers_pi(count);
        (0..count)
            .map(|k| {
                let t = k as f64 * p.delta;
                0.5 * self.constants.c0 * phi[k]
                    + 2.0 * self.constants.c1 * zeta_time(p.zeta_order, self.s(), t) * (self.n_freq * t).cos()
            })
            .collect()
    }

    /// `(γ₁ − γ₀)(kδ)` for `k = 0..count` by an FFT trapezoid rule over the
    /// (compact) perturbation band.
    pub fn delta_gamma_lags(&self, count: usize) -> Vec<f64> {
        let delta = self.params.delta;
        let (lo, hi) = self.band_limits();
        let w = hi - lo;
        let min_band_points = 4096.0;
        let m = ((4 * count).max((min_band_points * 2.0 * PI / (w * delta)) as usize)).next_power_of_two();
        let du = 2.0 * PI / (m as f64 * delta);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let points = (w / du).ceil() as usize + 1;
        for (i, slot) in buf.iter_mut().take(points.min(m)).enumerate() {
            slot.re = self.delta_f(lo + i as f64 * du);
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        (0..count)
            .map(|k| {
                let phase = lo * k as f64 * delta;
                let z = buf[k % m] * Complex64::new(phase.cos(), phase.sin());
                z.re * du / PI
            })
            .collect()
    }

    /// Upper bound on `∫|γ₀|`.
    pub fn gamma0_l1_bound(&self) -> f64 {
        0.5 * self.constants.c0 * self.params.delta / PI * self.params.phi.transform_l1()
            + 2.0 * self.constants.c1 * self.zeta_hat_at_zero()
    }

    /// Upper bound on `∫|γ₁ − γ₀|` from the modulus of the band envelope.
    pub fn delta_gamma_l1_bound(&self) -> f64 {
        let (lo, hi) = self.band_limits();
        let m = 1usize << 16;
        let pts = 4096usize;
        let dv = (hi - lo) / pts as f64;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (i, slot) in buf.iter_mut().take(pts + 1).enumerate() {
            slot.re = self.delta_f(lo + i as f64 * dv) * dv;
        }
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let dt = 2.0 * PI / (m as f64 * dv);
        buf.iter().map(|z| z.norm()).sum::<f64>() * dt / PI
    }

    /// Hölder exponent split `(ℓ, α)` with `ℓ = max{k : k < β + 1}`.
    pub fn holder_order(&self) -> (u32, f64) {
        let ell = self.params.beta.ceil() as u32;
        (ell, self.params.beta + 1.0 - ell as f64)
    }

    fn holder_of<F: Fn(f64, u32) -> f64>(&self, deriv: F, points: usize) -> f64 {
        let (ell, alpha) = self.holder_order();
        let (a, b) = self.params.interval();
        let ts: Vec<f64> = (0..points).map(|i| a + (b - a) * i as f64 / (points - 1) as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| deriv(t, ell)).collect();
        let mut best: f64 = 0.0;
        for i in 0..points {
            for j in i + 1..points {
                best = best.max((vals[i] - vals[j]).abs() / (ts[j] - ts[i]).powf(alpha));
            }
        }
        if alpha == 1.0 {
            for &t in &ts {
                best = best.max(deriv(t, ell + 1).abs());
            }
        }
        best
    }

    /// Hölder constant of `γ₀` on `I`.
    pub fn gamma0_holder(&self) -> f64 {
        self.holder_of(|t, j| self.gamma0_derivative_on_interval(t, j), 161)
    }

    /// Hölder constant of `γ₁ − γ₀` on `I`.
    pub fn delta_gamma_holder(&self) -> f64 {
        self.holder_of(|t, j| self.delta_gamma_derivative(t, j), 161)
    }

    /// Hölder constant of `γ₁` on `I`.
    pub fn gamma1_holder(&self) -> f64 {
        self.holder_of(
            |t, j| self.gamma0_derivative_on_interval(t, j) + self.delta_gamma_derivative(t, j),
            161,
        )
    }

    /// Separation from central differences of `γ₁ − γ₀` at `x0` with one
    /// Richardson step.
    pub fn separation_numeric(&self) -> f64 {
        let x0 = self.params.x0;
        let e = 1e-3 * x0;
        let cd = |h: f64| {
            (self.delta_gamma_derivative(x0 + h, 0) - self.delta_gamma_derivative(x0 - h, 0)) / (2.0 * h)
        };
        ((4.0 * cd(e / 2.0) - cd(e)) / 3.0).abs()
    }

    /// Frequency grid for `f₀`, `f₁`: covers `2(N + π/(4x0))` and the
    /// support of the `φ̂` term, with ≥ 32 points per band transition.
    pub fn spectral_grid_size(&self) -> (f64, usize) {
        let w = self.params.band_half_width();
        let omega_max = (2.0 * (self.n_freq + w)).max(1.5 * PI / self.params.delta);
        let transition = (PI / (12.0 * self.params.x0)).min(0.5 * PI / self.params.delta);
        let need = (2.0 * omega_max / (transition / 32.0)).ceil() as usize;
        (omega_max, need.next_power_of_two())
    }
}

/// The constructed pair on the sampling grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariancePair {
    pub construction: Construction,
    pub n_freq: f64,
    pub n0: u64,
    pub n_samples: usize,
    /// Closed-form separation `|γ₀'(x0) − γ₁'(x0)|`.
    pub a: f64,
    pub a_numeric: f64,
    pub b_n: f64,
    pub f1_min: f64,
    pub f0: SpectralGrid,
    pub f1: SpectralGrid,
    /// Lags `0..=n` of each covariance.
    pub gamma0: Vec<f64>,
    pub gamma1: Vec<f64>,
}

/// Builds the pair for `params` with the given constants.
pub fn build_pair(params: LowerBoundParams, constants: PairConstants) -> Result<CovariancePair> {
    let c = Construction::new(params, constants)?;
    pair_from_construction(c)
}

pub fn pair_from_construction(c: Construction) -> Result<CovariancePair> {
    let (omega_max, m) = c.spectral_grid_size();
    let f0 = SpectralGrid::from_fn(omega_max, m, |w| c.f0(w));
    let f1 = SpectralGrid::from_fn(omega_max, m, |w| c.f1(w));
    let f1_min = f1.min();
    if f1_min < -1e-12 {
        return Err(Error::PositivityViolated { min: f1_min });
    }
    let n = c.params.n_samples();
    let gamma0 = c.gamma0_lags(n + 1);
    let dg = if c.constants.c3 == 0.0 { vec![0.0; n + 1] } else { c.delta_gamma_lags(n + 1) };
    let gamma1: Vec<f64> = gamma0.iter().zip(&dg).map(|(a, b)| a + b).collect();
    let a = c.separation();
    let a_numeric = c.separation_numeric();
    Ok(CovariancePair {
        n_freq: c.n_freq,
        n0: c.n0,
        n_samples: n,
        a,
        a_numeric,
        b_n: c.b_n,
        f1_min,
        f0,
        f1,
        gamma0,
        gamma1,
        construction: c,
    })
}

/// Report of a calibration run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub constants: PairConstants,
    /// Fraction `c₂` of `L` granted to `γ₀`.
    pub c2: f64,
    pub gamma0_holder: f64,
    pub gamma1_holder: f64,
    pub gamma1_l1_bound: f64,
}

/// Chooses `c₀, c₁, c₃` for `params` (at its horizon): `c₁` spends a quarter
/// of `K` on the `ζ` term, `c₀` is the largest value with `γ₀ ∈ C_β(c₂L, I)`
/// and a quarter of `K` for the `φ` term, and `c₃` is the largest value
/// (with 1% slack) keeping `γ₁ ∈ C_β(L, I, K)`. `f₁ ≥ f₀` for every
/// `c₃ ≥ 0` because `ψ ≥ 0` on its support, so positivity never binds.
pub fn calibrate(params: LowerBoundParams, c21: f64, c2: f64) -> Result<Calibration> {
    let unit = PairConstants {
        c0: 1.0,
        c1: 1.0,
        c3: 1.0,
        c21,
    };
    let probe = Construction::new(params, unit)?;
    let k = params.k_bound;
    let c1 = k / (8.0 * probe.zeta_hat_at_zero());
    let phi_l1 = 0.5 * params.delta / PI * params.phi.transform_l1();
    let c0_l1 = 0.25 * k / phi_l1;
    let c0_holder = c2 * params.lipschitz / probe.gamma0_holder();
    let c0 = c0_l1.min(c0_holder).min(1.0);

    let base = Construction::new(params, PairConstants { c0, c1, c3: 1.0, c21 })?;
    let h0 = base.gamma0_holder();
    let h_unit = base.delta_gamma_holder();
    let l1_0 = base.gamma0_l1_bound();
    let l1_unit = base.delta_gamma_l1_bound();
    let c3 = 0.99 * ((params.lipschitz - h0) / h_unit).min((k - l1_0) / l1_unit);
    let constants = PairConstants { c0, c1, c3, c21 };
    let fin = Construction::new(params, constants)?;
    Ok(Calibration {
        constants,
        c2,
        gamma0_holder: h0,
        gamma1_holder: fin.gamma1_holder(),
        gamma1_l1_bound: fin.gamma0_l1_bound() + fin.delta_gamma_l1_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::spectral::{alias_density, fourier_series, lags_from_folded};

    fn params() -> LowerBoundParams {
        LowerBoundParams::new(1.0, 1.0, 1.0, 1.0, 0.5, 1.0 / 16.0, 512.0)
    }

    fn consts(c3: f64) -> PairConstants {
        PairConstants {
            c0: 0.05,
            c1: 1.0 / 16.0,
            c3,
            c21: 4.0,
        }
    }

    #[test]
    fn null_perturbation() {
        let p = build_pair(params(), consts(0.0)).unwrap();
        assert_eq!(p.gamma0, p.gamma1);
        assert_eq!(p.f0, p.f1);
        assert_eq!(p.a, 0.0);
    }

    #[test]
    fn separation_closed_form_vs_numeric() {
        let p = build_pair(params(), consts(1.3)).unwrap();
        assert!((p.a - p.a_numeric).abs() < 1e-3 * p.a, "{} vs {}", p.a, p.a_numeric);
        let c = &p.construction;
        assert!((p.a - 1.3 / (2.0 * PI) / c.n_freq).abs() < 1e-15);
    }

    #[test]
    fn nyquist_guard() {
        let mut pr = params();
        pr.delta = 0.5;
        assert!(matches!(
            Construction::new(pr, consts(1.0)),
            Err(Error::FrequencyAboveNyquist { .. })
        ));
    }

    #[test]
    fn b_n_grows_like_n_squared() {
        let c1 = Construction::with_n0(params(), consts(1.0), 3).unwrap();
        let c2 = Construction::with_n0(params(), consts(1.0), 7).unwrap();
        let r1 = c1.b_n / c1.n_freq.powi(2);
        let r2 = c2.b_n / c2.n_freq.powi(2);
        assert!(r1 > 0.0 && (r1 / r2 - 1.0).abs() < 0.5, "{r1} {r2}");
    }

    #[test]
    fn spectra_even_and_f1_dominates() {
        let p = build_pair(params(), consts(2.0)).unwrap();
        assert!(p.f0.asymmetry() < 1e-15 && p.f1.asymmetry() < 1e-12);
        for (a, b) in p.f0.values.iter().zip(&p.f1.values) {
            assert!(b >= a);
        }
    }

    #[test]
    fn negative_c3_can_break_positivity() {
        let c = Construction::new(params(), consts(-5e3)).unwrap();
        assert!(matches!(
            pair_from_construction(c),
            Err(Error::PositivityViolated { .. })
        ));
    }

    #[test]
    fn fourier_round_trip() {
        let p = build_pair(params(), consts(2.0)).unwrap();
        let c = &p.construction;
        let m = 4096;
        // Spectral → time: folded f₀, f₁ back to lags.
        let f0t = alias_density(&|w: f64| c.f0(w), c.params.delta, m);
        let f1t = alias_density(&|w: f64| c.f1(w), c.params.delta, m);
        let g0 = lags_from_folded(&f0t, 200);
        let g1 = lags_from_folded(&f1t, 200);
        let err0 = g0.iter().zip(&p.gamma0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let err1 = g1.iter().zip(&p.gamma1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err0 < 1e-8 && err1 < 1e-8, "{err0} {err1}");
        // Time → spectral: Fourier series of the lags reproduces f̃₀.
        let back = fourier_series(&p.gamma0[..4000], m);
        let err = back.values.iter().zip(&f0t.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn gamma0_on_interval_is_phi_term() {
        let p = build_pair(params(), consts(1.0)).unwrap();
        let c = &p.construction;
        let (a, b) = c.params.interval();
        let delta = c.params.delta;
        let phi = c.params.phi.transform_at_integers_pi(p.gamma0.len());
        for k in 0..p.gamma0.len() {
            let t = k as f64 * delta;
            if t >= a && t <= b {
                assert!((p.gamma0[k] - 0.5 * c.constants.c0 * phi[k]).abs() < 1e-15);
            }
        }
        for t in [0.55, 1.0, 1.4] {
            let direct = c.gamma0(t);
            assert!((direct - c.gamma0_derivative_on_interval(t, 0)).abs() < 1e-13);
        }
    }

    #[test]
    fn aliased_f0_bounded_below_by_c0() {
        let c = Construction::new(params(), consts(1.0)).unwrap();
        let f = alias_density(&|w: f64| c.f0(w), c.params.delta, 2048);
        assert!(f.min() >= c.constants.c0 * (1.0 - 1e-12));
    }

    #[test]
    fn delta_gamma_lags_match_quadrature() {
        let c = Construction::new(params(), consts(1.0)).unwrap();
        let lags = c.delta_gamma_lags(8193);
        for k in [0usize, 1, 16, 50, 400, 8000] {
            let q = c.delta_gamma_derivative(k as f64 * c.params.delta, 0);
            assert!((lags[k] - q).abs() < 1e-12, "k={k}: {} vs {q}", lags[k]);
        }
    }

    #[test]
    fn calibrated_pair_is_in_class() {
        let pr = params();
        let cal = calibrate(pr, 4.0, 0.5).unwrap();
        assert!(cal.gamma0_holder <= 0.5 * pr.lipschitz * (1.0 + 1e-9));
        assert!(cal.gamma1_holder <= pr.lipschitz);
        assert!(cal.gamma1_l1_bound <= pr.k_bound);
        assert!(cal.constants.c3 > 0.0);
    }
}
