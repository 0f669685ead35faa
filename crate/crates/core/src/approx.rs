//! Approximate posteriors: exact pass-through, Beta-mixture misspecification
//! and the two worst-case adversaries, plus divergence-budget checks.
//!
//! The adversaries are two-arm constructions. Arm 0 is the optimal arm.
//! The Thompson adversary shrinks arm 0's posterior above the median of arm 1
//! by `1/r`; the UCB adversary shrinks arm 1's posterior below the quantile
//! that arm 0 is about to be scored at, so arm 1's quantile always wins once
//! `γ_t > 1/r`.

use crate::agents::QuantileSchedule;
use crate::bandit::{BernoulliEnv, PosteriorState};
use crate::dist::{make_piecewise_left_boost, make_piecewise_right_boost, BetaMixture, BetaParams, UnivariateDistribution};
use crate::divergence::{alpha_divergence, DivergenceResult};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproxScheme {
    Exact,
    /// `(1-w) Beta(1+S, 1+N-S) + w Beta(Γ(1+S), Γ(1+N-S))`.
    Mixture { w: f64, gamma_scale: f64 },
    TsAdversary { r: f64 },
    UcbAdversary { r: f64 },
}

impl ApproxScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ApproxScheme::Exact => Ok(()),
            ApproxScheme::Mixture { w, gamma_scale } => {
                if !(0.0..=1.0).contains(&w) {
                    return Err(invalid(format!("mixture weight must lie in [0,1], got {w}")));
                }
                if !(gamma_scale > 0.0 && gamma_scale.is_finite()) {
                    return Err(invalid(format!("gamma_scale must be positive, got {gamma_scale}")));
                }
                Ok(())
            }
            ApproxScheme::TsAdversary { r } | ApproxScheme::UcbAdversary { r } => {
                if !(r > 1.0 && r.is_finite()) {
                    return Err(invalid(format!("adversary ratio r must exceed 1, got {r}")));
                }
                Ok(())
            }
        }
    }

    /// Short label without commas, used in CSV output.
    pub fn label(&self) -> String {
        match *self {
            ApproxScheme::Exact => "exact".to_string(),
            ApproxScheme::Mixture { w, gamma_scale } => format!("mixture:w={w}:gamma={gamma_scale}"),
            ApproxScheme::TsAdversary { r } => format!("ts_adversary:r={r}"),
            ApproxScheme::UcbAdversary { r } => format!("ucb_adversary:r={r}"),
        }
    }

    fn is_adversary(&self) -> bool {
        matches!(self, ApproxScheme::TsAdversary { .. } | ApproxScheme::UcbAdversary { .. })
    }
}

/// `Q_{t,arm}` after `t` completed steps.
///
/// The UCB adversary places its breakpoint at `Qu(γ_{t+1}, Π_{t,0})`, the level
/// used at the next step, and needs `schedule`. When that breakpoint is
/// degenerate (0 or 1, e.g. `γ = 0` at the first step) the exact posterior
/// is returned.
pub fn approx_posterior(
    scheme: &ApproxScheme,
    state: &PosteriorState,
    t: u64,
    arm: usize,
    schedule: Option<&QuantileSchedule>,
) -> Result<UnivariateDistribution> {
    scheme.validate()?;
    if arm >= state.num_arms() {
        return Err(invalid(format!("arm {arm} out of range for {} arms", state.num_arms())));
    }
    if scheme.is_adversary() && state.num_arms() != 2 {
        return Err(Error::AdversaryArms(state.num_arms()));
    }
    let exact = state.exact_posterior(arm);
    match *scheme {
        ApproxScheme::Exact => Ok(exact.into()),
        ApproxScheme::Mixture { w, gamma_scale } => {
            let scaled = BetaParams::new(gamma_scale * exact.a(), gamma_scale * exact.b())?;
            Ok(BetaMixture::new(vec![1.0 - w, w], vec![exact, scaled])?.into())
        }
        ApproxScheme::TsAdversary { r } => {
            if arm == 1 {
                return Ok(exact.into());
            }
            let other: UnivariateDistribution = state.exact_posterior(1).into();
            let b = other.quantile(0.5);
            Ok(make_piecewise_left_boost(exact.into(), b, r)
                .map(Into::into)
                .unwrap_or_else(|_| exact.into()))
        }
        ApproxScheme::UcbAdversary { r } => {
            if arm == 0 {
                return Ok(exact.into());
            }
            let schedule = schedule.ok_or_else(|| invalid("the UCB adversary needs a quantile schedule"))?;
            let leader: UnivariateDistribution = state.exact_posterior(0).into();
            let b = leader.quantile_upper(schedule.tail(t + 1));
            Ok(make_piecewise_right_boost(exact.into(), b, r)
                .map(Into::into)
                .unwrap_or_else(|_| exact.into()))
        }
    }
}

/// Approximate posteriors of every arm.
pub fn approx_posteriors(
    scheme: &ApproxScheme,
    state: &PosteriorState,
    t: u64,
    schedule: Option<&QuantileSchedule>,
) -> Result<Vec<UnivariateDistribution>> {
    (0..state.num_arms())
        .map(|arm| approx_posterior(scheme, state, t, arm, schedule))
        .collect()
}

/// Budget `D_α(Q, Π) <= ε` for an `α₁ > 1` and an `α₂ < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceBudget {
    pub epsilon: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl DivergenceBudget {
    pub fn new(epsilon: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !(alpha1 > 1.0) || !(alpha2 < 0.0) {
            return Err(invalid(format!(
                "budget needs epsilon > 0, alpha1 > 1, alpha2 < 0; got {epsilon}, {alpha1}, {alpha2}"
            )));
        }
        Ok(DivergenceBudget { epsilon, alpha1, alpha2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetReport {
    pub d_alpha1: f64,
    pub d_alpha2: f64,
    pub within: bool,
}

/// `D_α(Q_{t,arm}, Π_{t,arm})`.
pub fn approx_divergence(
    scheme: &ApproxScheme,
    state: &PosteriorState,
    t: u64,
    arm: usize,
    schedule: Option<&QuantileSchedule>,
    alpha: f64,
    tol: f64,
) -> Result<DivergenceResult> {
    let q = approx_posterior(scheme, state, t, arm, schedule)?;
    let exact: UnivariateDistribution = state.exact_posterior(arm).into();
    alpha_divergence(&q, &exact, alpha, tol)
}

/// Checks both inequalities of a budget; infinite divergences count as violations.
pub fn verify_budget(
    scheme: &ApproxScheme,
    state: &PosteriorState,
    t: u64,
    arm: usize,
    schedule: Option<&QuantileSchedule>,
    budget: &DivergenceBudget,
    tol: f64,
) -> Result<BudgetReport> {
    let div_tol = tol.min(crate::divergence::DEFAULT_TOL);
    let d1 = approx_divergence(scheme, state, t, arm, schedule, budget.alpha1, div_tol)?.value;
    let d2 = approx_divergence(scheme, state, t, arm, schedule, budget.alpha2, div_tol)?.value;
    let limit = budget.epsilon + tol;
    Ok(BudgetReport {
        d_alpha1: d1,
        d_alpha2: d2,
        within: d1 <= limit && d2 <= limit,
    })
}

/// Largest adversary ratio keeping a single `D_α(Q, Π) <= ε`, for `α < 1`.
///
/// Returns `f64::INFINITY` when the budget places no limit on `r`.
pub fn max_adversary_r(epsilon: f64, alpha: f64) -> Result<f64> {
    if !(alpha < 1.0) || !alpha.is_finite() {
        return Err(invalid(format!("adversary bound needs alpha < 1, got {alpha}")));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    if alpha == 0.0 {
        return Ok(epsilon.exp());
    }
    let base = epsilon * alpha * (alpha - 1.0) + 1.0;
    if base <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(base.powf(-1.0 / alpha))
}

/// Per-step regret floor `½(1 - 1/r)(μ₀ - μ₁)` under the Thompson adversary.
pub fn adversary_slope_floor(env: &BernoulliEnv, r: f64) -> Result<f64> {
    if env.num_arms() != 2 {
        return Err(Error::AdversaryArms(env.num_arms()));
    }
    if !(r > 1.0) {
        return Err(invalid(format!("r must exceed 1, got {r}")));
    }
    let gap = (env.mu()[0] - env.mu()[1]).abs();
    Ok(0.5 * (1.0 - 1.0 / r) * gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchTime {
    At(u64),
    NotReached,
}

/// Slack on `γ_t > 1/r`, so that `r = 1/γ_{T}` does not count `T` itself through rounding.
const SWITCH_SLACK: f64 = 1e-12;

/// First `t` in `1..=horizon` with `gamma(t) > 1/r`.
pub fn first_exceedance(gamma: impl Fn(u64) -> f64, horizon: u64, r: f64) -> SwitchTime {
    let level = 1.0 / r + SWITCH_SLACK;
    (1..=horizon)
        .find(|&t| gamma(t) > level)
        .map_or(SwitchTime::NotReached, SwitchTime::At)
}

/// First step from which the UCB adversary captures every selection.
pub fn ucb_adversary_switch_time(schedule: &QuantileSchedule, r: f64) -> SwitchTime {
    first_exceedance(|t| schedule.gamma(t), schedule.horizon(), r)
}

/// The ratio `r = 1/γ_{t0}`, so that the switch happens right after `t0`.
pub fn r_for_switch_after(schedule: &QuantileSchedule, t0: u64) -> Result<f64> {
    let g = schedule.gamma(t0);
    if !(g > 0.0) {
        return Err(invalid(format!("gamma at t0 = {t0} is zero; no finite r")));
    }
    Ok(1.0 / g)
}
