//! Randomized verification suites behind the `verify-*` and `adversary-check`
//! subcommands. Each suite returns structured checks; the CLI prints them as
//! `CHECK <name> <pass|fail> <measured> <bound>`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agents::QuantileSchedule;
use crate::approx::{approx_divergence, max_adversary_r, ApproxScheme};
use crate::bandit::PosteriorState;
use crate::dist::{BetaMixture, BetaParams, UnivariateDistribution};
use crate::divergence::{alpha_divergence, alpha_divergence_quantile_form, kl_divergence, DEFAULT_TOL};
use crate::error::Result;
use crate::shift::{
    extremal_pair, g_of_delta, measure_shift, shift_lower_bound, shift_upper_bound, unbounded_shift_threshold,
    ShiftBoundParams,
};

/// One verification outcome. `measured <= bound` is the pass condition for
/// every check built here.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            // NaN fails.
            pass: measured <= bound,
            measured,
            bound,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} {:e} {:e}",
            self.name,
            if self.pass { "pass" } else { "fail" },
            self.measured,
            self.bound
        )
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Tolerances of the divergence suite.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
pub const DUAL_TOL: f64 = 5e-8;
/// α values cycled through by the dual-route comparison.
pub const DUAL_ALPHAS: [f64; 5] = [-1.0, 0.0, 0.5, 1.0, 2.0];

/// Shape drawn log-uniformly from `[0.5, 50]`.
fn random_shape<R: Rng>(rng: &mut R) -> f64 {
    (rng.random_range(0.5f64.ln()..50f64.ln())).exp()
}

pub fn random_beta<R: Rng>(rng: &mut R) -> BetaParams {
    BetaParams::new(random_shape(rng), random_shape(rng)).expect("positive shapes")
}

/// Disagreement of two routes: absolute below 1, relative above. Both infinite counts as agreement.
pub fn route_disagreement(a: f64, b: f64) -> f64 {
    if a.is_infinite() && b.is_infinite() && a.signum() == b.signum() {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Closed forms, dual-route agreement on `trials` random Beta pairs, the
/// `α ↔ 1-α` symmetry, and a zero divergence for the exact scheme.
pub fn divergence_suite(trials: usize, tol: f64, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unif: UnivariateDistribution = BetaParams::new(1.0, 1.0)?.into();
    let tri: UnivariateDistribution = BetaParams::new(2.0, 1.0)?.into();
    let half = alpha_divergence(&unif, &tri, 0.5, tol)?.value;
    // 4 (1 - 2√2/3) and 1 - ln 2.
    let half_exact = 4.0 * (1.0 - 2.0 * 2f64.sqrt() / 3.0);
    let kl = kl_divergence(&unif, &tri, tol)?.value;
    let kl_exact = 1.0 - 2f64.ln();
    let mut checks = vec![
        Check::at_most("divergence_closed_form_alpha_half", (half - half_exact).abs(), CLOSED_FORM_TOL),
        Check::at_most("divergence_closed_form_kl", (kl - kl_exact).abs(), CLOSED_FORM_TOL),
    ];

    let mut worst_dual: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    for i in 0..trials {
        let p1: UnivariateDistribution = random_beta(&mut rng).into();
        let p2: UnivariateDistribution = random_beta(&mut rng).into();
        let alpha = DUAL_ALPHAS[i % DUAL_ALPHAS.len()];
        let direct = alpha_divergence(&p1, &p2, alpha, tol)?.value;
        let quant = alpha_divergence_quantile_form(&p1, &p2, alpha, tol)?.value;
        worst_dual = worst_dual.max(route_disagreement(direct, quant));
        let mirrored = alpha_divergence(&p2, &p1, 1.0 - alpha, tol)?.value;
        worst_sym = worst_sym.max(route_disagreement(direct, mirrored));
    }
    checks.push(Check::at_most("divergence_dual_routes", worst_dual, DUAL_TOL));
    checks.push(Check::at_most("divergence_symmetry", worst_sym, 2.0 * tol));

    let mut worst_exact: f64 = 0.0;
    for _ in 0..trials.clamp(1, 20) {
        let state = random_state(&mut rng, 2, 200);
        for alpha in [2.0, -1.0] {
            let d = approx_divergence(&ApproxScheme::Exact, &state, state.steps(), 0, None, alpha, tol)?.value;
            worst_exact = worst_exact.max(d.abs());
        }
    }
    checks.push(Check::at_most("divergence_exact_scheme_zero", worst_exact, tol));
    Ok(checks)
}

/// Posterior counts with up to `max_pulls` pulls per arm.
pub fn random_state<R: Rng>(rng: &mut R, arms: usize, max_pulls: u64) -> PosteriorState {
    let pulls: Vec<u64> = (0..arms).map(|_| rng.random_range(0..=max_pulls)).collect();
    let successes = pulls.iter().map(|&n| rng.random_range(0..=n)).collect();
    PosteriorState::from_counts(successes, pulls).expect("successes never exceed pulls")
}

/// A random Beta, or a two-component Beta mixture half of the time.
fn random_base<R: Rng>(rng: &mut R) -> Result<UnivariateDistribution> {
    if rng.random_bool(0.5) {
        return Ok(random_beta(rng).into());
    }
    let w = rng.random_range(0.05..0.95);
    Ok(BetaMixture::new(vec![w, 1.0 - w], vec![random_beta(rng), random_beta(rng)])?.into())
}

pub const SHIFT_SLACK: f64 = 1e-8;
pub const SHIFT_TIGHTNESS: f64 = 1e-7;

/// Summary of one extremal-pair instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftInstance {
    pub gamma: f64,
    pub delta: f64,
    pub alpha: f64,
    /// Closed-form `D_α` of the pair.
    pub epsilon: f64,
    /// Numerically integrated `D_α` of the pair.
    pub epsilon_numeric: f64,
    pub measured: f64,
    /// Bound evaluated at `epsilon_numeric`.
    pub bound_numeric: f64,
}

impl ShiftInstance {
    /// Amount by which the measured shift passes the bound (negative when inside).
    pub fn excess(&self) -> f64 {
        if self.alpha > 1.0 {
            self.measured - self.bound_numeric
        } else {
            self.bound_numeric - self.measured
        }
    }
}

pub fn shift_instance(p1: &UnivariateDistribution, gamma: f64, delta: f64, alpha: f64) -> Result<ShiftInstance> {
    let p2 = extremal_pair(p1, gamma, delta)?;
    let measured = measure_shift(p1, &p2, gamma);
    let epsilon = g_of_delta(gamma, delta, alpha);
    let epsilon_numeric = alpha_divergence(p1, &p2, alpha, DEFAULT_TOL)?.value;
    let bound = |eps: f64| -> Result<f64> {
        let params = ShiftBoundParams::new(gamma, eps.max(0.0), alpha)?;
        if alpha > 1.0 {
            shift_upper_bound(&params)
        } else {
            shift_lower_bound(&params)
        }
    };
    Ok(ShiftInstance {
        gamma,
        delta,
        alpha,
        epsilon,
        epsilon_numeric,
        measured,
        bound_numeric: bound(epsilon_numeric)?,
    })
}

/// Random extremal pairs: soundness of the bound at the numerically measured
/// divergence, the pair hitting both its target shift and its closed-form
/// divergence, and the unbounded regime for `α = 0.5`, `ε = 4`.
pub fn shift_suite(trials: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_tight: f64 = 0.0;
    for i in 0..trials {
        let p1: UnivariateDistribution = random_beta(&mut rng).into();
        let gamma = rng.random_range(0.5..0.99);
        let delta = rng.random_range(-0.95 * gamma..0.95 * (1.0 - gamma));
        let alpha = if i % 2 == 0 {
            rng.random_range(1.1..5.0)
        } else {
            -rng.random_range(0.1..5.0)
        };
        let inst = shift_instance(&p1, gamma, delta, alpha)?;
        worst_excess = worst_excess.max(inst.excess());
        // The pair realizes its target shift and sits exactly at budget g(δ).
        worst_tight = worst_tight
            .max((inst.measured - delta).abs())
            .max(route_disagreement(inst.epsilon_numeric, inst.epsilon));
    }
    let mut checks = vec![
        Check::at_most("shift_soundness", worst_excess.max(0.0), SHIFT_SLACK),
        Check::at_most("shift_tightness", worst_tight, SHIFT_TIGHTNESS),
    ];

    // With α = 0.5 no bound survives ε = 4: both extreme shifts fit the budget.
    let eps = unbounded_shift_threshold(0.5)?;
    let mut worst_div: f64 = 0.0;
    let mut worst_hit: f64 = 0.0;
    for _ in 0..trials.clamp(1, 20) {
        let p1 = random_base(&mut rng)?;
        let gamma = rng.random_range(0.05..0.95);
        for delta in [-gamma + 0.01, 1.0 - gamma - 0.01] {
            let p2 = extremal_pair(&p1, gamma, delta)?;
            let d = alpha_divergence(&p1, &p2, 0.5, DEFAULT_TOL)?.value;
            worst_div = worst_div.max(d - eps);
            worst_hit = worst_hit.max((measure_shift(&p1, &p2, gamma) - delta).abs());
        }
    }
    checks.push(Check::at_most("shift_unbounded_budget", worst_div.max(0.0), SHIFT_SLACK));
    checks.push(Check::at_most("shift_unbounded_reach", worst_hit, SHIFT_TIGHTNESS));
    Ok(checks)
}

pub const BUDGET_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    Ts,
    Ucb,
}

/// Posterior states for budget checks: the fresh state, states where the
/// arms are well separated (the adversary's worst case), then random ones.
pub fn adversary_states<R: Rng>(rng: &mut R, count: usize) -> Vec<PosteriorState> {
    let mut out = vec![PosteriorState::new(2)];
    let separated = [(90, 100, 5, 100), (900, 1000, 100, 1000), (40, 50, 2, 50), (10, 10, 0, 10)];
    for &(s0, n0, s1, n1) in &separated {
        if out.len() >= count {
            break;
        }
        out.push(PosteriorState::from_counts(vec![s0, s1], vec![n0, n1]).expect("valid counts"));
    }
    while out.len() < count {
        out.push(random_state(rng, 2, 300));
    }
    out.truncate(count);
    out
}

/// `D_α(Q, Π)` of the adversarially modified arm over `states` random posterior states.
///
/// Emits the ratio check `r <= max_adversary_r` and the divergence check
/// `max D_α <= ε + 1e-6`. `r` defaults to `0.99 · max_adversary_r`.
pub fn adversary_suite(
    kind: AdversaryKind,
    epsilon: f64,
    alpha: f64,
    r: Option<f64>,
    states: usize,
    seed: u64,
) -> Result<Vec<Check>> {
    let r_max = max_adversary_r(epsilon, alpha)?;
    let r = match r {
        Some(r) => r,
        None if r_max.is_finite() => 0.99 * r_max,
        // Any ratio fits; pick a large one.
        None => 1e6,
    };
    let (scheme, arm) = match kind {
        AdversaryKind::Ts => (ApproxScheme::TsAdversary { r }, 0),
        AdversaryKind::Ucb => (ApproxScheme::UcbAdversary { r }, 1),
    };
    scheme.validate()?;
    let schedule = QuantileSchedule::new(1.0, 0.0, 10_000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for state in adversary_states(&mut rng, states) {
        let d = approx_divergence(&scheme, &state, state.steps(), arm, Some(&schedule), alpha, DEFAULT_TOL)?.value;
        worst = worst.max(d);
    }
    let label = match kind {
        AdversaryKind::Ts => "ts",
        AdversaryKind::Ucb => "ucb",
    };
    Ok(vec![
        Check::at_most(format!("adversary_{label}_ratio"), r, r_max),
        Check::at_most(format!("adversary_{label}_budget"), worst, epsilon + BUDGET_SLACK),
    ])
}
