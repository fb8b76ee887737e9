//! Numerical quadrature and scalar root finding.

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = r * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// Subdivides until the Kronrod/Gauss discrepancy on every panel is below
/// `max(abs_tol, rel_tol * |integral|)` scaled to the panel length.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _) = gauss_kronrod(&f, a, b);
    let mut stack = vec![(a, b, 0u32)];
    let mut total = 0.0;
    let mut comp = 0.0;
    let span = (b - a).abs();
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gauss_kronrod(&f, lo, hi);
        let tol = abs_tol.max(rel_tol * whole.abs()) * ((hi - lo).abs() / span).max(1e-3);
        if err <= tol || depth >= 48 {
            // Neumaier summation keeps thousands of panels exact enough.
            let t = total + val;
            if total.abs() >= val.abs() {
                comp += (total - t) + val;
            } else {
                comp += (val - t) + total;
            }
            total = t;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    total + comp
}

/// Integral of `f` over `[a, ∞)`, summed over doubling panels until a panel
/// contributes less than `abs_tol`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, abs_tol: f64) -> f64 {
    let mut lo = a;
    let mut width = scale.max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    let mut quiet = 0;
    for _ in 0..200 {
        let part = integrate(&f, lo, lo + width, abs_tol * 1e-2, 1e-13);
        total += part;
        if part.abs() <= abs_tol {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo += width;
        width *= 2.0;
    }
    total
}

/// Composite Gauss–Legendre rule with `panels` panels of 16 nodes each.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 8] = [
        0.095_012_509_837_637_44,
        0.281_603_550_779_258_9,
        0.458_016_777_657_227_4,
        0.617_876_244_402_643_7,
        0.755_404_408_355_003,
        0.865_631_202_387_831_7,
        0.944_575_023_073_232_6,
        0.989_400_934_991_649_9,
    ];
    const W: [f64; 8] = [
        0.189_450_610_455_068_5,
        0.182_603_415_044_923_6,
        0.169_156_519_395_002_5,
        0.149_595_988_816_576_7,
        0.124_628_971_255_533_9,
        0.095_158_511_682_492_78,
        0.062_253_523_938_647_89,
        0.027_152_459_411_754_09,
    ];
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let r = 0.5 * h;
        let mut s = 0.0;
        for i in 0..8 {
            s += W[i] * (f(c - r * X[i]) + f(c + r * X[i]));
        }
        total += s * r;
    }
    total
}

/// Solves `f(t) = 0` for a function that is nonincreasing on `[lo, ∞)` with
/// `f(lo) >= 0`, expanding the bracket by doubling, then bisecting until the
/// bracket is narrower than `tol * max(1, t)`.
pub fn invert_decreasing<F: Fn(f64) -> f64>(f: F, lo: f64, initial_hi: f64, tol: f64) -> f64 {
    let mut lo = lo;
    let mut hi = initial_hi.max(lo + f64::EPSILON);
    let mut guard = 0;
    while f(hi) > 0.0 && guard < 2000 {
        lo = hi;
        hi *= 2.0;
        guard += 1;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}
