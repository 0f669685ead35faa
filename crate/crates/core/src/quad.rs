//! Global adaptive Gauss–Kronrod quadrature (7-point Gauss, 15-point Kronrod).
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below the requested absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const MAX_SUBINTERVALS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub subintervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let resabs = {
        let mut s = WGK[7] * fc.abs();
        for j in 0..7 {
            s += WGK[j] * (fv1[j].abs() + fv2[j].abs());
        }
        s * half.abs()
    };
    resasc *= half.abs();
    let value = kron * half;
    let mut err = ((kron - gauss) * half).abs();
    // QUADPACK's rescaling of the raw Gauss/Kronrod difference.
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err, resabs)
}

/// Integrates `f` over `[a, b]`, first splitting at the `breaks` that fall inside.
///
/// A non-finite integrand value makes the result non-finite; callers decide
/// whether that means divergence.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> QuadResult {
    integrate_rel(f, a, b, breaks, tol, 0.0)
}

/// As [`integrate`], stopping once the error estimate is below `tol` or below `rel_tol * |value|`.
pub fn integrate_rel<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
    rel_tol: f64,
) -> QuadResult {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(a);
    edges.extend(pts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, err, abs) = kronrod(&mut f, w[0], w[1]);
        total += value;
        total_err += err;
        total_abs += abs;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value,
            err,
            abs,
        });
    }
    if !total.is_finite() {
        return QuadResult {
            value: total,
            abs_error: f64::INFINITY,
            subintervals: heap.len(),
        };
    }
    // Below this the estimate is dominated by rounding and refining only adds noise.
    let floor = |abs: f64| 100.0 * f64::EPSILON * abs;
    while total_err > tol.max(rel_tol * total.abs()) && total_err > floor(total_abs) && heap.len() < MAX_SUBINTERVALS {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval has hit floating-point resolution; keep it as is.
            heap.push(Piece { err: 0.0, ..worst });
            total_err -= worst.err;
            continue;
        }
        let (v1, e1, a1) = kronrod(&mut f, worst.a, mid);
        let (v2, e2, a2) = kronrod(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        total_abs += a1 + a2 - worst.abs;
        if !total.is_finite() {
            return QuadResult {
                value: total,
                abs_error: f64::INFINITY,
                subintervals: heap.len() + 2,
            };
        }
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
            abs: a1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
            abs: a2,
        });
        // Running sums drift; resum occasionally.
        if heap.len() % 512 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
            total_abs = heap.iter().map(|p| p.abs).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let abs_error = heap.iter().map(|p| p.err).sum();
    QuadResult {
        value,
        abs_error,
        subintervals: heap.len(),
    }
}
