//! Thompson sampling, BUCB and EBUCB decision rules.

use rand::Rng;

use crate::dist::UnivariateDistribution;
use crate::divergence::bernoulli_kl;
use crate::error::{invalid, Result};

/// The quantile levels `γ_t = max(0, 1 - 1/(t^ζ (ln T)^c))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSchedule {
    zeta: f64,
    c: f64,
    horizon: u64,
    /// `(ln T)^c`, 1 when `c = 0`.
    log_factor: f64,
}

impl QuantileSchedule {
    pub fn new(zeta: f64, c: f64, horizon: u64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(invalid(format!("zeta must be positive, got {zeta}")));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(invalid(format!("c must be nonnegative, got {c}")));
        }
        if horizon < 1 {
            return Err(invalid("horizon must be at least 1"));
        }
        if c > 0.0 && horizon < 2 {
            return Err(invalid("a positive c needs horizon >= 2 so that ln T > 0"));
        }
        let log_factor = if c == 0.0 { 1.0 } else { (horizon as f64).ln().powf(c) };
        Ok(QuantileSchedule {
            zeta,
            c,
            horizon,
            log_factor,
        })
    }

    /// BUCB's levels `1 - 1/(t (ln T)^c)`.
    pub fn bucb(c: f64, horizon: u64) -> Result<Self> {
        Self::new(1.0, c, horizon)
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Upper-tail mass `1 - γ_t`, computed without cancellation.
    pub fn tail(&self, t: u64) -> f64 {
        (1.0 / ((t as f64).powf(self.zeta) * self.log_factor)).min(1.0)
    }

    pub fn gamma(&self, t: u64) -> f64 {
        1.0 - self.tail(t)
    }
}

/// `ζ = 1/α̃₂ = (α₂-1)/α₂`, the exponent matched to a budget on `D_{α₂}` with `α₂ < 0`.
pub fn matched_zeta(alpha2: f64) -> Result<f64> {
    if !(alpha2 < 0.0) {
        return Err(invalid(format!("alpha2 must be negative, got {alpha2}")));
    }
    Ok((alpha2 - 1.0) / alpha2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentSpec {
    ThompsonSampling,
    Bucb { c: f64 },
    Ebucb { zeta: f64, c: f64 },
}

impl AgentSpec {
    /// The quantile schedule over `horizon` steps; `None` for Thompson sampling.
    pub fn schedule(&self, horizon: u64) -> Result<Option<QuantileSchedule>> {
        match *self {
            AgentSpec::ThompsonSampling => Ok(None),
            AgentSpec::Bucb { c } => QuantileSchedule::bucb(c, horizon).map(Some),
            AgentSpec::Ebucb { zeta, c } => QuantileSchedule::new(zeta, c, horizon).map(Some),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AgentSpec::ThompsonSampling => "ts",
            AgentSpec::Bucb { .. } => "bucb",
            AgentSpec::Ebucb { .. } => "ebucb",
        }
    }
}

/// Index of the largest value; ties are broken uniformly with `rng`.
pub fn argmax_random_tie<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> usize {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..values.len()).filter(|&j| values[j] == best).collect();
    match ties.len() {
        0 => 0,
        1 => ties[0],
        n => ties[rng.random_range(0..n)],
    }
}

pub fn select_thompson<R: Rng + ?Sized>(posteriors: &[UnivariateDistribution], rng: &mut R) -> usize {
    let draws: Vec<f64> = posteriors.iter().map(|p| p.sample(rng)).collect();
    argmax_random_tie(&draws, rng)
}

/// Arm with the largest `γ_t`-quantile.
pub fn select_ebucb<R: Rng + ?Sized>(
    posteriors: &[UnivariateDistribution],
    t: u64,
    schedule: &QuantileSchedule,
    rng: &mut R,
) -> usize {
    let q = schedule.tail(t);
    let levels: Vec<f64> = posteriors.iter().map(|p| p.quantile_upper(q)).collect();
    argmax_random_tie(&levels, rng)
}

pub fn select_bucb<R: Rng + ?Sized>(
    posteriors: &[UnivariateDistribution],
    t: u64,
    c: f64,
    horizon: u64,
    rng: &mut R,
) -> Result<usize> {
    let schedule = QuantileSchedule::bucb(c, horizon)?;
    Ok(select_ebucb(posteriors, t, &schedule, rng))
}

/// `Σ_j Δ_j (1+ξ)(α̃₁/α̃₂) / d(μ_j, μ*)` over suboptimal arms: the predicted
/// coefficient of `ln T` in the regret.
pub fn theoretical_log_coefficient(mu: &[f64], alpha1: f64, alpha2: f64, xi: f64) -> Result<f64> {
    if !(alpha1 > 1.0) || !(alpha2 < 0.0) {
        return Err(invalid(format!("need alpha1 > 1 and alpha2 < 0, got {alpha1}, {alpha2}")));
    }
    if !(xi >= 0.0) {
        return Err(invalid(format!("xi must be nonnegative, got {xi}")));
    }
    let best = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mu.iter().filter(|&&m| m == best).count() > 1 {
        return Err(invalid("several arms share the best mean; the gap vanishes"));
    }
    let tilde = |a: f64| a / (a - 1.0);
    let ratio = tilde(alpha1) / tilde(alpha2);
    Ok(mu
        .iter()
        .filter(|&&m| m < best)
        .map(|&m| (best - m) * (1.0 + xi) * ratio / bernoulli_kl(m, best))
        .sum())
}
