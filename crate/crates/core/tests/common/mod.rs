//! Oracles shared by the integration tests. Nothing here calls the crate's
//! own quadrature or inversion, so agreement is evidence rather than echo.
#![allow(dead_code)]

use ebucb::dist::{Point, UnivariateDistribution};

/// Adaptive Simpson on `[a, b]` with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∫₀¹ pdf` computed in logit coordinates over `z ∈ [-60, 60]`, split at
/// `breaks` and at a few quantiles so that narrow peaks are not stepped over.
pub fn total_mass(d: &UnivariateDistribution, breaks: &[f64]) -> f64 {
    let f = |z: f64| {
        let pt = Point::from_logit(z);
        (d.ln_pdf_at(&pt) + pt.ln_x + pt.ln_y).exp()
    };
    let mut cuts = vec![-60.0];
    let levels = [1e-9, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-3, 1.0 - 1e-9];
    let at_levels = levels.iter().map(|&u| d.quantile(u));
    for b in breaks.iter().copied().chain(at_levels) {
        if b > 0.0 && b < 1.0 {
            cuts.push((b / (1.0 - b)).ln());
        }
    }
    cuts.push(60.0);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| simpson(&f, w[0], w[1], 1e-12)).sum()
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Root of an increasing function on `[lo, hi]` by plain bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
