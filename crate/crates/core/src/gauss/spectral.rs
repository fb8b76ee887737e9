//! Band-limited building blocks of the lower-bound construction and
//! spectral-density utilities. Fourier pair convention:
//! `f(ω) = ∫ γ(t) e^{iωt} dt`, `γ(t) = (1/2π) ∫ f(ω) e^{−iωt} dω`.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// A `C^∞` even bump: `1` on `[−1, 1]`, `0` outside `[−3/2, 3/2]`, monotone
/// in between. The transition is the ratio `s(1−x) / (s(x) + s(1−x))` with
/// `s(x) = exp(−sharpness / x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiHat {
    pub sharpness: f64,
}

impl Default for PhiHat {
    fn default() -> Self {
        Self { sharpness: 1.0 }
    }
}

pub fn build_phi_hat(sharpness: f64) -> Result<PhiHat> {
    if !(sharpness > 0.0 && sharpness.is_finite()) {
        return Err(Error::InvalidParameter(format!("sharpness must be positive, got {sharpness}")));
    }
    Ok(PhiHat { sharpness })
}

impl PhiHat {
    fn s(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-self.sharpness / x).exp()
        }
    }

    pub fn eval(&self, w: f64) -> f64 {
        let a = w.abs();
        if a <= 1.0 {
            1.0
        } else if a >= 1.5 {
            0.0
        } else {
            let x = 2.0 * (a - 1.0);
            let (p, q) = (self.s(1.0 - x), self.s(x));
            p / (p + q)
        }
    }

    /// `j`-th derivative of `Φ(s) = ∫ φ̂(u) e^{−ius} du`.
    pub fn transform_derivative(&self, s: f64, j: u32) -> f64 {
        let phase = j as f64 * PI / 2.0;
        let panels = 32 + (2.0 * s.abs()).ceil() as usize;
        let inner = quad::gauss_legendre(|u| u.powi(j as i32) * (u * s + phase).cos(), 0.0, 1.0, panels);
        let outer = quad::gauss_legendre(
            |u| self.eval(u) * u.powi(j as i32) * (u * s + phase).cos(),
            1.0,
            1.5,
            panels,
        );
        2.0 * (inner + outer)
    }

    pub fn transform(&self, s: f64) -> f64 {
        self.transform_derivative(s, 0)
    }

    /// `Φ(πk)` for `k = 0..count`, from the trapezoid rule applied to the
    /// 2-periodic extension of `φ̂`, which is exact up to the (super-
    /// algebraically small) aliasing of a smooth periodic function.
    pub fn transform_at_integers_pi(&self, count: usize) -> Vec<f64> {
        let m = 8192usize;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|i| {
                let u = -1.0 + 2.0 * i as f64 / m as f64;
                Complex64::new(1.0 + self.eval(u - 2.0) + self.eval(u + 2.0), 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        // Σ P(u_i) e^{−iπk u_i} = e^{iπk} · FFT[k]
        (0..count)
            .map(|k| {
                if k >= m / 2 {
                    0.0
                } else {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * buf[k].re * 2.0 / m as f64
                }
            })
            .collect()
    }

    /// `∫ |Φ(s)| ds`, from a zero-padded FFT of `φ̂`.
    pub fn transform_l1(&self) -> f64 {
        let m = 1usize << 17;
        let half_band = 128.0;
        let du = 2.0 * half_band / m as f64;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|i| {
                let u = -half_band + i as f64 * du;
                Complex64::new(self.eval(u), 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let ds = 2.0 * PI / (m as f64 * du);
        // |Φ(s_k)| is unaffected by the phase from the grid offset.
        buf.iter().map(|c| c.norm() * du).sum::<f64>() * ds
    }
}

fn check_zeta(ell: usize, x0: f64, d: f64) -> Result<()> {
    if ell < 2 || ell % 2 != 0 {
        return Err(Error::InvalidParameter(format!("zeta order must be even and >= 2, got {ell}")));
    }
    if !(d > 0.0 && d < x0) {
        return Err(Error::InvalidParameter(format!("need 0 < d < x0, got d={d}, x0={x0}")));
    }
    Ok(())
}

fn zeta_hat_unchecked(ell: usize, s: f64, omega: f64) -> f64 {
    let z = omega * s / ell as f64;
    let ratio = if z.abs() < 1e-8 { 2.0 * (1.0 - z * z / 6.0) } else { 2.0 * z.sin() / z };
    s / ell as f64 * ratio.powi(ell as i32)
}

/// `ζ̂(ω) = (s/ℓ) [2 sin(ωs/ℓ) / (ωs/ℓ)]^ℓ` with `s = x0 − d`.
pub fn build_zeta_hat(ell: usize, x0: f64, d: f64, omega: f64) -> Result<f64> {
    check_zeta(ell, x0, d)?;
    Ok(zeta_hat_unchecked(ell, x0 - d, omega))
}

/// `ζ(t) = ζ_ℓ(ℓt/s)`, the `ℓ`-fold self-convolution of `1_{[−1,1]}`
/// rescaled to support `[−s, s]`.
pub fn zeta_time(ell: usize, s: f64, t: f64) -> f64 {
    let x = ell as f64 * t / s;
    if x.abs() >= ell as f64 {
        return 0.0;
    }
    let y = 0.5 * (x + ell as f64);
    let mut fact = 1.0;
    for i in 1..ell {
        fact *= i as f64;
    }
    let mut binom = 1.0;
    let mut acc = 0.0;
    for j in 0..=ell {
        let base = y - j as f64;
        if base > 0.0 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * base.powi(ell as i32 - 1);
        }
        binom = binom * (ell - j) as f64 / (j + 1) as f64;
    }
    (2f64.powi(ell as i32 - 1) / fact * acc).max(0.0)
}

/// Evaluates a spectral density at a frequency.
pub trait SpectralDensity {
    fn density(&self, omega: f64) -> f64;
}

impl<F: Fn(f64) -> f64> SpectralDensity for F {
    fn density(&self, omega: f64) -> f64 {
        self(omega)
    }
}

/// Density sampled at `ω_j = −ω_max + 2ω_max j/m`, `j = 0..m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub omega_max: f64,
    pub m: usize,
    pub values: Vec<f64>,
}

impl SpectralGrid {
    pub fn from_fn<F: Fn(f64) -> f64>(omega_max: f64, m: usize, f: F) -> Self {
        let values = (0..m).map(|j| f(-omega_max + 2.0 * omega_max * j as f64 / m as f64)).collect();
        Self { omega_max, m, values }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.omega_max / self.m as f64
    }

    pub fn omega(&self, j: usize) -> f64 {
        -self.omega_max + self.spacing() * j as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|f(ω_j) − f(−ω_j)|`.
    pub fn asymmetry(&self) -> f64 {
        (1..self.m)
            .map(|j| (self.values[j] - self.values[self.m - j]).abs())
            .fold(0.0, f64::max)
    }
}

impl SpectralDensity for SpectralGrid {
    /// Linear interpolation; zero outside the grid.
    fn density(&self, omega: f64) -> f64 {
        let pos = (omega + self.omega_max) / self.spacing();
        if pos < 0.0 || pos > self.m as f64 {
            return 0.0;
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        let at = |j: usize| if j < self.m { self.values[j] } else { self.values[self.m - j % self.m] };
        at(i) * (1.0 - frac) + at(i + 1) * frac
    }
}

fn folded_value<F: SpectralDensity + ?Sized>(f: &F, omega: f64, delta: f64) -> f64 {
    let mut sum = f.density(omega / delta);
    let mut quiet = 0;
    let mut j = 1i64;
    while j < 10_000_000 {
        let shift = 2.0 * PI * j as f64;
        let pair = f.density((omega + shift) / delta) + f.density((omega - shift) / delta);
        sum += pair;
        if pair.abs() <= 1e-14 * sum.abs() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        j += 1;
    }
    sum / delta
}

/// Folded density `f̃(ω) = (1/δ) Σ_j f((ω + 2πj)/δ)` on `m` points of
/// `(−π, π]`; the grid is `ω_j = −π + 2π j/m`, with `ω_0 = −π ≡ π`.
pub fn alias_density<F: SpectralDensity + ?Sized>(f: &F, delta: f64, m: usize) -> SpectralGrid {
    SpectralGrid::from_fn(PI, m, |w| folded_value(f, w, delta))
}

/// `Σ_{|k|<n} γ_k e^{ikω}` on the grid of [`alias_density`].
pub fn fourier_series(lags: &[f64], m: usize) -> SpectralGrid {
    SpectralGrid::from_fn(PI, m, |w| {
        lags[0] + 2.0 * lags.iter().enumerate().skip(1).map(|(k, g)| g * (k as f64 * w).cos()).sum::<f64>()
    })
}

/// Lags `γ_k = (1/2π) ∫_{−π}^{π} f̃(ω) cos(kω) dω` of a folded density by the
/// trapezoid rule on its periodic grid.
pub fn lags_from_folded(f: &SpectralGrid, count: usize) -> Vec<f64> {
    let m = f.m;
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    (0..count)
        .map(|k| {
            let kk = k % m;
            // ω_j = −π + 2πj/m ⇒ e^{−ikω_j} = (−1)^k e^{−2πijk/m}.
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * buf[kk].re / m as f64
        })
        .collect()
}
