//! Quantile shifts under an α-divergence budget.
//!
//! If `D_α(P1, P2) <= ε`, the γ-quantile of `P1` sits at the `(γ+δ)`-quantile
//! of `P2`, and `δ` is bounded above (α > 1) or below (α < 0) by
//! `1 - γ - M (1-γ)^α̃` with `M = (εα(α-1)+1)^(1/(1-α))` and `α̃ = α/(α-1)`.
//! For α in (0, 1) no such bound exists once `ε >= -1/(α(α-1))`.

use crate::dist::{PiecewiseReweighted, Tail, UnivariateDistribution};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftFactors {
    pub m: f64,
    pub alpha_tilde: f64,
}

/// `M_{ε,α}` and `α̃` for `α` outside `[0, 1]`.
pub fn shift_factor(epsilon: f64, alpha: f64) -> Result<ShiftFactors> {
    if !alpha.is_finite() || (0.0..=1.0).contains(&alpha) {
        return Err(invalid(format!("shift factors need alpha outside [0,1], got {alpha}")));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let base = epsilon * alpha * (alpha - 1.0) + 1.0;
    Ok(ShiftFactors {
        m: base.powf(1.0 / (1.0 - alpha)),
        alpha_tilde: alpha / (alpha - 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftBoundParams {
    gamma: f64,
    epsilon: f64,
    alpha: f64,
}

impl ShiftBoundParams {
    pub fn new(gamma: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(invalid(format!("gamma must lie in (0,1), got {gamma}")));
        }
        // Validates epsilon and alpha.
        shift_factor(epsilon, alpha)?;
        Ok(ShiftBoundParams { gamma, epsilon, alpha })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn bound(&self) -> f64 {
        let f = shift_factor(self.epsilon, self.alpha).expect("validated at construction");
        let tail = 1.0 - self.gamma;
        tail - f.m * tail.powf(f.alpha_tilde)
    }
}

/// Largest shift `δ` compatible with `D_α <= ε` for `α > 1`.
pub fn shift_upper_bound(p: &ShiftBoundParams) -> Result<f64> {
    if p.alpha <= 1.0 {
        return Err(invalid(format!("upper bound needs alpha > 1, got {}", p.alpha)));
    }
    Ok(p.bound())
}

/// Smallest shift `δ` compatible with `D_α <= ε` for `α < 0`. May fall below `-γ`.
pub fn shift_lower_bound(p: &ShiftBoundParams) -> Result<f64> {
    if p.alpha >= 0.0 {
        return Err(invalid(format!("lower bound needs alpha < 0, got {}", p.alpha)));
    }
    Ok(p.bound())
}

/// Budget `-1/(α(α-1))` from which every shift is reachable, for `α` in (0, 1).
pub fn unbounded_shift_threshold(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("threshold exists only for alpha in (0,1), got {alpha}")));
    }
    Ok(-1.0 / (alpha * (alpha - 1.0)))
}

/// `δ = F2(R1(γ)) - γ`.
pub fn measure_shift(p1: &UnivariateDistribution, p2: &UnivariateDistribution, gamma: f64) -> f64 {
    let pt = if gamma <= 0.5 {
        p1.quantile_point_ln(Tail::Lower, gamma.ln())
    } else {
        p1.quantile_point_ln(Tail::Upper, (1.0 - gamma).ln())
    };
    let (lf, ls) = p2.ln_cdf_sf_at(&pt);
    if gamma <= 0.5 {
        lf.exp() - gamma
    } else {
        (1.0 - gamma) - ls.exp()
    }
}

/// Two-piece reweighting of `p1` that moves exactly `γ + δ` mass below `R1(γ)`.
///
/// The factors use the computed `F1(R1(γ))` rather than `γ`, so the shift
/// measured on the result is `δ` up to rounding.
pub fn extremal_pair(p1: &UnivariateDistribution, gamma: f64, delta: f64) -> Result<UnivariateDistribution> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let below = gamma + delta;
    let above = (1.0 - gamma) - delta;
    if !(below > 0.0 && above > 0.0) {
        return Err(invalid(format!(
            "delta must lie strictly inside (-gamma, 1-gamma), got {delta} at gamma {gamma}"
        )));
    }
    let b = p1.quantile(gamma);
    let (lf, ls) = p1.ln_cdf_sf_at(&crate::dist::Point::from_x(b));
    let piece = PiecewiseReweighted::from_ln_factors(p1.clone(), b, below.ln() - lf, above.ln() - ls)?;
    Ok(piece.into())
}

/// `D_α` between `P1` and its extremal partner, in closed form.
///
/// At the endpoints `0^(1-α)` is 0 for `α < 1` and `+inf` for `α > 1`.
/// Returns NaN for `α` in {0, 1}.
pub fn g_of_delta(gamma: f64, delta: f64, alpha: f64) -> f64 {
    if alpha == 0.0 || alpha == 1.0 {
        return f64::NAN;
    }
    let k = alpha * (alpha - 1.0);
    let lo = ((gamma + delta) / gamma).max(0.0).powf(1.0 - alpha);
    let hi = ((1.0 - gamma - delta) / (1.0 - gamma)).max(0.0).powf(1.0 - alpha);
    gamma / k * lo + (1.0 - gamma) / k * hi - 1.0 / k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::BetaParams;
    use crate::divergence::{alpha_divergence, DEFAULT_TOL};

    fn beta(a: f64, b: f64) -> UnivariateDistribution {
        BetaParams::new(a, b).unwrap().into()
    }

    #[test]
    fn shift_factor_examples() {
        let f = shift_factor(0.5, 2.0).unwrap();
        assert!((f.m - 0.5).abs() < 1e-15 && (f.alpha_tilde - 2.0).abs() < 1e-15);
        let f = shift_factor(0.5, -1.0).unwrap();
        assert!((f.m - 2f64.sqrt()).abs() < 1e-15 && (f.alpha_tilde - 0.5).abs() < 1e-15);
        assert!((shift_factor(1e-12, 3.0).unwrap().m - 1.0).abs() < 1e-10);
        assert!(shift_factor(0.5, 0.5).is_err());
        assert!(shift_factor(0.5, 0.0).is_err());
        assert!(shift_factor(0.5, 1.0).is_err());
    }

    #[test]
    fn bound_examples() {
        let p = ShiftBoundParams::new(0.9, 0.5, 2.0).unwrap();
        assert!((shift_upper_bound(&p).unwrap() - 0.095).abs() < 1e-15);
        let p = ShiftBoundParams::new(0.9, 0.0, 2.0).unwrap();
        assert!((shift_upper_bound(&p).unwrap() - 0.09).abs() < 1e-15);
        let p = ShiftBoundParams::new(0.9, 0.5, -1.0).unwrap();
        let expect = 0.1 - 2f64.sqrt() * 0.1f64.sqrt();
        assert!((shift_lower_bound(&p).unwrap() - expect).abs() < 1e-14);
        assert!((expect + 0.347_214).abs() < 1e-6);
        let p = ShiftBoundParams::new(0.9, 0.0, -1.0).unwrap();
        assert!((shift_lower_bound(&p).unwrap() + 0.216_228).abs() < 1e-6);
        assert!(shift_upper_bound(&ShiftBoundParams::new(0.9, 0.5, -1.0).unwrap()).is_err());
        assert!(shift_lower_bound(&ShiftBoundParams::new(0.9, 0.5, 2.0).unwrap()).is_err());
        assert!(ShiftBoundParams::new(1.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn measure_shift_examples() {
        let p = beta(3.0, 4.0);
        assert!(measure_shift(&p, &p, 0.7).abs() < 1e-14);
        let d = measure_shift(&beta(1.0, 1.0), &beta(2.0, 1.0), 0.5);
        assert!((d + 0.25).abs() < 1e-14);
    }

    #[test]
    fn extremal_pair_is_exact() {
        let p1 = beta(1.0, 1.0);
        let p2 = extremal_pair(&p1, 0.8, 0.1).unwrap();
        assert!((measure_shift(&p1, &p2, 0.8) - 0.1).abs() < 1e-10);
        let d = alpha_divergence(&p1, &p2, 2.0, DEFAULT_TOL).unwrap();
        assert!((d.value - g_of_delta(0.8, 0.1, 2.0)).abs() < 1e-8, "{}", d.value);

        let same = extremal_pair(&p1, 0.5, 0.0).unwrap();
        for &x in &[0.1, 0.5, 0.9] {
            assert!((same.cdf(x) - x).abs() < 1e-14);
        }
        assert!(extremal_pair(&p1, 0.5, 0.5).is_err());
        assert!(extremal_pair(&p1, 0.5, -0.5).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_of_delta(0.5, 0.0, 2.0), 0.0);
        let expect = 0.4 * (8.0 / 9.0) + 0.1 * 2.0 - 0.5;
        assert!((g_of_delta(0.8, 0.1, 2.0) - expect).abs() < 1e-15);
        assert!((g_of_delta(0.8, 0.1, 2.0) - 0.055_556).abs() < 1e-6);
        assert!(g_of_delta(0.8, 0.05, 2.0) < g_of_delta(0.8, 0.1, 2.0));
        assert_eq!(g_of_delta(0.8, 0.2, 2.0), f64::INFINITY);
        assert!(g_of_delta(0.8, 0.2, -1.0).is_finite());
        assert!(g_of_delta(0.8, 0.1, 1.0).is_nan());
    }

    #[test]
    fn threshold_for_unbounded_regime() {
        assert!((unbounded_shift_threshold(0.5).unwrap() - 4.0).abs() < 1e-15);
        assert!(unbounded_shift_threshold(2.0).is_err());
    }
}
