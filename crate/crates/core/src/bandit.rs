//! Bernoulli bandit environment and conjugate Beta posterior bookkeeping.

use rand::Rng;

use crate::dist::BetaParams;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliEnv {
    mu: Vec<f64>,
    best: f64,
}

impl BernoulliEnv {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.len() < 2 {
            return Err(invalid(format!("need at least two arms, got {}", mu.len())));
        }
        if let Some(m) = mu.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(invalid(format!("mean reward {m} outside [0,1]")));
        }
        let best = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(BernoulliEnv { mu, best })
    }

    pub fn num_arms(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Gap `max_j μ_j - μ_arm`.
    pub fn regret_increment(&self, arm: usize) -> Result<f64> {
        self.check(arm)?;
        Ok(self.best - self.mu[arm])
    }

    /// Draws a Bernoulli(μ_arm) reward.
    pub fn pull<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<u32> {
        self.check(arm)?;
        Ok(u32::from(rng.random::<f64>() < self.mu[arm]))
    }

    /// Pseudo-regret `Σ_j Δ_j N_j` of a pull-count vector.
    pub fn pseudo_regret(&self, pulls: &[u64]) -> f64 {
        self.mu
            .iter()
            .zip(pulls)
            .map(|(m, &n)| (self.best - m) * n as f64)
            .sum()
    }

    fn check(&self, arm: usize) -> Result<()> {
        if arm >= self.mu.len() {
            return Err(invalid(format!("arm {arm} out of range for {} arms", self.mu.len())));
        }
        Ok(())
    }
}

/// Per-arm success and pull counts; arm `j` has posterior `Beta(1+S_j, 1+N_j-S_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosteriorState {
    successes: Vec<u64>,
    pulls: Vec<u64>,
}

impl PosteriorState {
    pub fn new(num_arms: usize) -> Self {
        PosteriorState {
            successes: vec![0; num_arms],
            pulls: vec![0; num_arms],
        }
    }

    /// Builds a state from counts, checking `S_j <= N_j`.
    pub fn from_counts(successes: Vec<u64>, pulls: Vec<u64>) -> Result<Self> {
        if successes.len() != pulls.len() {
            return Err(invalid("successes and pulls differ in length"));
        }
        if successes.iter().zip(&pulls).any(|(s, n)| s > n) {
            return Err(invalid("successes exceed pulls"));
        }
        Ok(PosteriorState { successes, pulls })
    }

    pub fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn successes(&self) -> &[u64] {
        &self.successes
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    /// Number of completed steps, `Σ_j N_j`.
    pub fn steps(&self) -> u64 {
        self.pulls.iter().sum()
    }

    pub fn update(&mut self, arm: usize, reward: u32) {
        debug_assert!(reward <= 1);
        self.successes[arm] += u64::from(reward);
        self.pulls[arm] += 1;
    }

    pub fn exact_posterior(&self, arm: usize) -> BetaParams {
        let s = self.successes[arm] as f64;
        let n = self.pulls[arm] as f64;
        BetaParams::new(1.0 + s, 1.0 + n - s).expect("shapes are at least 1")
    }
}

/// One replication's cumulative pseudo-regret and action history.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub horizon: usize,
    /// `cum_regret[t-1]` is the regret after `t` steps.
    pub cum_regret: Vec<f64>,
    pub pulls: Vec<u64>,
    pub actions: Vec<usize>,
    pub seed: u64,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }
}
