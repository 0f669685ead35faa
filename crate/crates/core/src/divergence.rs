//! Tsallis α-divergence and KL divergence between densities on [0, 1].
//!
//! Two independent routes are provided. The direct route integrates over x;
//! the quantile route integrates the density ratio `r(u) = p2(R1(u)) / p1(R1(u))`
//! over u, where `R1` is the quantile function of the first argument.
//!
//! Both routes integrate the nonnegative form
//! `[p1^α p2^(1-α) - α p1 - (1-α) p2] / (α(α-1))`, whose integral equals the
//! usual definition because both densities integrate to one. It avoids the
//! cancellation of `∫ p1^α p2^(1-α) - 1` when `α(α-1)` is small.
//!
//! Integration runs in the logit variable `z = ln(x/(1-x))` over
//! `[δ, 1-δ]` with `δ = 1e-10`. Each tail beyond that is estimated from two
//! further chunks, `[1e-12, 1e-10]` and `[1e-14, 1e-12]`; their ratio decides
//! between a geometric tail correction and a divergence flag.

use crate::dist::{Point, Tail, UnivariateDistribution};
use crate::error::{Error, Result};
use crate::quad::integrate_rel;

const DELTA: f64 = 1e-10;
const DELTA_2: f64 = 1e-12;
const DELTA_3: f64 = 1e-14;
/// Tail ratio at or above which the integral is declared divergent.
const DIVERGENT_RATIO: f64 = 0.99;
const INFINITE_THRESHOLD: f64 = 1e12;
/// Large values only need relative accuracy.
const REL_TOL: f64 = 1e-12;

pub const DEFAULT_TOL: f64 = 1e-8;

const LEVELS: [f64; 11] = [
    1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 0.999_999,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DirectIntegral,
    QuantileRepresentation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult {
    /// `f64::INFINITY` flags a divergent integral.
    pub value: f64,
    pub estimated_abs_error: f64,
    pub method: Method,
}

impl DivergenceResult {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// `D_α(p1, p2)`; `α = 1` gives `KL(p1, p2)` and `α = 0` gives `KL(p2, p1)`.
pub fn alpha_divergence(
    p1: &UnivariateDistribution,
    p2: &UnivariateDistribution,
    alpha: f64,
    tol: f64,
) -> Result<DivergenceResult> {
    check_args(p1, p2, alpha, tol)?;
    let mut breaks = Vec::new();
    for d in [p1, p2] {
        for &u in &LEVELS {
            breaks.push(logit_of(d.quantile(u)));
        }
        breaks.extend(d.breakpoints().into_iter().map(logit_of));
    }
    let integrand = |pt: Point| {
        let jac = pt.ln_x + pt.ln_y;
        let l1 = p1.ln_pdf_at(&pt) + jac;
        let l2 = p2.ln_pdf_at(&pt) + jac;
        f_alpha(l1, l2, alpha)
    };
    let z = |x: f64| logit_of(x);
    let cuts = [z(DELTA), z(DELTA_2), z(DELTA_3)];
    let cuts_hi = [z(1.0 - DELTA), z(1.0 - DELTA_2), z(1.0 - DELTA_3)];
    let (value, err) = integrate_logit(integrand, &breaks, tol, cuts, cuts_hi);
    Ok(finish(value, err, Method::DirectIntegral))
}

pub fn kl_divergence(p1: &UnivariateDistribution, p2: &UnivariateDistribution, tol: f64) -> Result<DivergenceResult> {
    alpha_divergence(p1, p2, 1.0, tol)
}

/// `D_α(p1, p2)` computed as an integral over quantile levels of the first argument.
pub fn alpha_divergence_quantile_form(
    p1: &UnivariateDistribution,
    p2: &UnivariateDistribution,
    alpha: f64,
    tol: f64,
) -> Result<DivergenceResult> {
    check_args(p1, p2, alpha, tol)?;
    let mut breaks: Vec<f64> = LEVELS.iter().map(|&u| logit_of(u)).collect();
    let mut xs: Vec<f64> = LEVELS.iter().map(|&u| p2.quantile(u)).collect();
    xs.extend(p1.breakpoints());
    xs.extend(p2.breakpoints());
    for x in xs {
        let (lf, ls) = p1.ln_cdf_sf_at(&Point::from_x(x));
        breaks.push(lf - ls);
    }
    let integrand = |pu: Point| {
        let px = if pu.x <= 0.5 {
            p1.quantile_point_ln(Tail::Lower, pu.ln_x)
        } else {
            p1.quantile_point_ln(Tail::Upper, pu.ln_y)
        };
        let ln_r = p2.ln_pdf_at(&px) - p1.ln_pdf_at(&px);
        // du/dz = u(1-u); the reference density in u is 1.
        let jac = pu.ln_x + pu.ln_y;
        f_alpha(jac, ln_r + jac, alpha)
    };
    // Truncate at the quantile levels of the same x cut-offs the direct route uses.
    let w = |x: f64| {
        let (lf, ls) = p1.ln_cdf_sf_at(&Point::from_x(x));
        lf - ls
    };
    let cuts = [w(DELTA), w(DELTA_2), w(DELTA_3)];
    let cuts_hi = [w(1.0 - DELTA), w(1.0 - DELTA_2), w(1.0 - DELTA_3)];
    let (value, err) = integrate_logit(integrand, &breaks, tol, cuts, cuts_hi);
    Ok(finish(value, err, Method::QuantileRepresentation))
}

fn check_args(p1: &UnivariateDistribution, p2: &UnivariateDistribution, alpha: f64, tol: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(crate::error::invalid(format!("alpha must be finite, got {alpha}")));
    }
    if !(tol > 0.0) {
        return Err(crate::error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    for (name, d) in [("first", p1), ("second", p2)] {
        if !d.has_full_support() {
            return Err(Error::Support(format!("{name} argument has a zero-density region")));
        }
    }
    Ok(())
}

fn finish(value: f64, err: f64, method: Method) -> DivergenceResult {
    let value = if !value.is_finite() || value > INFINITE_THRESHOLD {
        f64::INFINITY
    } else {
        value
    };
    DivergenceResult {
        value,
        estimated_abs_error: if value.is_finite() { err } else { f64::INFINITY },
        method,
    }
}

fn logit_of(x: f64) -> f64 {
    Point::from_x(x).logit()
}

/// Pointwise integrand of the nonnegative form from log densities `l1`, `l2`.
fn f_alpha(l1: f64, l2: f64, alpha: f64) -> f64 {
    if l1 == f64::NEG_INFINITY && l2 == f64::NEG_INFINITY {
        return 0.0;
    }
    if alpha == 1.0 {
        return f_kl(l1, l2);
    }
    if alpha == 0.0 {
        return f_kl(l2, l1);
    }
    let denom = alpha * (alpha - 1.0);
    let d = l1 - l2;
    if d == f64::INFINITY {
        // p2 vanished numerically: p1^α p2^(1-α) is 0 for α < 1 and +inf for α > 1.
        return if alpha > 1.0 {
            f64::INFINITY
        } else {
            -alpha * l1.exp() / denom
        };
    }
    if d == f64::NEG_INFINITY {
        return if alpha < 0.0 {
            f64::INFINITY
        } else {
            -(1.0 - alpha) * l2.exp() / denom
        };
    }
    if d.abs() < 1.0 {
        l2.exp() * (f64::exp_m1(alpha * d) - alpha * d.exp_m1()) / denom
    } else {
        let cross = (alpha * l1 + (1.0 - alpha) * l2).exp();
        (cross - alpha * l1.exp() - (1.0 - alpha) * l2.exp()) / denom
    }
}

/// `p1 ln(p1/p2) - p1 + p2`.
fn f_kl(l1: f64, l2: f64) -> f64 {
    if l1 == f64::NEG_INFINITY {
        return l2.exp();
    }
    if l2 == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let d = l1 - l2;
    if d.abs() < 1.0 {
        l2.exp() * (d * d.exp() - d.exp_m1())
    } else {
        l1.exp() * (d - 1.0) + l2.exp()
    }
}

/// Integrates `f(point) dz` over `[lo[0], hi[0]]` plus tail estimates.
///
/// `lo` and `hi` hold the logit cut points for the truncation and the two
/// further tail chunks at each end, ordered outward.
fn integrate_logit<F: Fn(Point) -> f64>(f: F, breaks: &[f64], tol: f64, lo: [f64; 3], hi: [f64; 3]) -> (f64, f64) {
    let g = |t: f64| f(Point::from_logit(t));
    let finite_breaks: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite()).collect();
    let main = integrate_rel(g, lo[0], hi[0], &finite_breaks, tol, REL_TOL);
    if !main.value.is_finite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut value = main.value;
    let mut err = main.abs_error;
    for [c0, c1, c2] in [lo, hi] {
        let chunk = |x: f64, y: f64| integrate_rel(g, x.min(y), x.max(y), &[], tol, REL_TOL);
        let (t1, t2) = (chunk(c0, c1), chunk(c1, c2));
        let (a, b) = (t1.value, t2.value);
        if !(a.is_finite() && b.is_finite()) {
            return (f64::INFINITY, f64::INFINITY);
        }
        err += t1.abs_error + t2.abs_error;
        if a <= 0.0 {
            continue;
        }
        let rho = b / a;
        if rho >= DIVERGENT_RATIO && a > 1e-280 {
            return (f64::INFINITY, f64::INFINITY);
        }
        let rho = rho.max(0.0);
        let tail = a / (1.0 - rho);
        value += tail;
        err += (tail - a - b).abs();
    }
    (value, err)
}

/// Bernoulli KL `d(p, q)` with `0 ln 0 = 0` and `x ln(x/0) = +inf` for `x > 0`.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    let term = |x: f64, y: f64| {
        if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x * (x / y).ln()
        }
    };
    (term(p, q) + term(1.0 - p, 1.0 - q)).max(0.0)
}

/// `d(p, q)` when `p < q`, else 0.
pub fn bernoulli_kl_plus(p: f64, q: f64) -> f64 {
    if p < q {
        bernoulli_kl(p, q)
    } else {
        0.0
    }
}
