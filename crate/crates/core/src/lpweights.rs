//! Lag segments `D_x` and minimum-norm derivative-reproducing weights.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentCase {
    /// `x ≤ h`: window `[0, 2h]`.
    Left,
    /// `h < x ≤ T − δ − h`: window `[x − h, x + h]`.
    Interior,
    /// `x > T − δ − h`: window `[T − δ − 2h, T − δ]`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub case: SegmentCase,
}

impl Segment {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

pub(crate) fn segment_case(x: f64, h: f64, horizon: f64, delta: f64) -> SegmentCase {
    if x <= h {
        SegmentCase::Left
    } else if x <= horizon - delta - h {
        SegmentCase::Interior
    } else {
        SegmentCase::Right
    }
}

/// The lag segment `D_x` for window width `h` on `[0, T − δ]`.
pub fn segment(x: f64, h: f64, horizon: f64, delta: f64) -> Result<Segment> {
    let top = horizon - delta;
    if !(0.0..=top).contains(&x) {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            lo: 0.0,
            hi: top,
        });
    }
    if !(h > 0.0) || 2.0 * h > top {
        return Err(Error::OutOfRange {
            what: "h",
            value: h,
            lo: 0.0,
            hi: 0.5 * top,
        });
    }
    let case = segment_case(x, h, horizon, delta);
    let (lo, hi) = match case {
        SegmentCase::Left => (0.0, 2.0 * h),
        SegmentCase::Interior => (x - h, x + h),
        SegmentCase::Right => (top - 2.0 * h, top),
    };
    Ok(Segment { lo, hi, case })
}

/// Solved weights `a_k(x)` on the contiguous lag range `indices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSet {
    pub x: f64,
    pub segment: Segment,
    pub delta: f64,
    pub ell: usize,
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub warnings: Vec<String>,
}

impl WeightSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn max_lag(&self) -> usize {
        self.indices.last().copied().unwrap_or(0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.weights.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|a| a.abs()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Grid lags `k ∈ {1, …, n−1}` with `kδ ∈ [lo, hi]` (small tolerance).
pub fn lag_indices(segment: &Segment, grid: &GridSpec) -> Vec<usize> {
    let tol = 1e-9 * grid.delta;
    let first = (((segment.lo - tol) / grid.delta).ceil().max(1.0)) as usize;
    let last = ((segment.hi + tol) / grid.delta).floor() as usize;
    let last = last.min(grid.n - 1);
    if last < first {
        Vec::new()
    } else {
        (first..=last).collect()
    }
}

/// Minimum-norm `b` with `Σ b_k u_k^j = [j = 1]` for `j = 0..=ell`.
///
/// Solved through a column-pivoted QR factorisation of the transposed
/// constraint matrix, so `b` lies in its row space by construction.
pub fn min_norm_unit_derivative(u: &[f64], ell: usize) -> Result<Vec<f64>> {
    let m = ell + 1;
    let npts = u.len();
    if npts < m {
        return Err(Error::InfeasibleDesign(format!(
            "{npts} abscissae cannot carry {m} constraints"
        )));
    }
    let vt = DMatrix::from_fn(npts, m, |k, j| u[k].powi(j as i32));
    let qr = vt.clone().col_piv_qr();
    let r = qr.r();
    let r00 = r[(0, 0)].abs();
    for i in 0..m {
        if !(r[(i, i)].abs() > 1e-12 * r00) {
            return Err(Error::InfeasibleDesign(format!(
                "constraint matrix has rank {i} < {m}"
            )));
        }
    }
    let mut rhs = DVector::zeros(m);
    if m > 1 {
        rhs[1] = 1.0;
    }
    qr.p().permute_rows(&mut rhs);
    let y = r
        .transpose()
        .solve_lower_triangular(&rhs)
        .ok_or_else(|| Error::InfeasibleDesign("triangular solve failed".into()))?;
    let b = qr.q() * y;

    for j in 0..m {
        let (mut res, mut scale) = (0.0, 0.0);
        for k in 0..npts {
            let t = b[k] * vt[(k, j)];
            res += t;
            scale += t.abs();
        }
        let target = if j == 1 { 1.0 } else { 0.0 };
        if (res - target).abs() > 1e-10 * scale.max(1.0) {
            return Err(Error::InfeasibleDesign(format!(
                "constraint {j} residual {:e}",
                res - target
            )));
        }
    }
    Ok(b.iter().copied().collect())
}

/// Weights `a_k(x)` solving the minimum-norm problem on `segment`.
pub fn solve_weights(x: f64, segment: &Segment, grid: &GridSpec, ell: usize) -> Result<WeightSet> {
    let indices = lag_indices(segment, grid);
    let h = segment.half_width();
    if indices.len() < ell + 1 {
        return Err(Error::TooFewPoints {
            have: indices.len(),
            need: ell + 1,
            ell,
        });
    }
    let mut warnings = Vec::new();
    if h < 0.5 * (ell as f64 + 2.0) * grid.delta {
        warnings.push(format!(
            "h = {h} below (ell + 2) * delta / 2 = {}",
            0.5 * (ell as f64 + 2.0) * grid.delta
        ));
    }
    if segment.case == SegmentCase::Right {
        warnings.push("window in terminal band; covariance estimates there use few pairs".into());
    }
    let u: Vec<f64> = indices
        .iter()
        .map(|&k| (k as f64 * grid.delta - x) / h)
        .collect();
    let b = min_norm_unit_derivative(&u, ell)?;
    Ok(WeightSet {
        x,
        segment: *segment,
        delta: grid.delta,
        ell,
        indices,
        weights: b.into_iter().map(|v| v / h).collect(),
        warnings,
    })
}

/// `Σ a_k values[k]` over the weight set.
pub fn apply_weights(w: &WeightSet, values: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (k, a) in w.iter() {
        let v = values.get(k).ok_or(Error::MissingLag(k))?;
        acc += a * v;
    }
    Ok(acc)
}

/// Like [`apply_weights`] but for values supplied by lag lookup.
pub fn apply_weights_with<F: FnMut(usize) -> Option<f64>>(w: &WeightSet, mut value: F) -> Result<f64> {
    let mut acc = 0.0;
    for (k, a) in w.iter() {
        acc += a * value(k).ok_or(Error::MissingLag(k))?;
    }
    Ok(acc)
}
