//! Replication loop, seeding and aggregation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::agents::{select_ebucb, select_thompson, AgentSpec, QuantileSchedule};
use crate::approx::{approx_posteriors, ApproxScheme};
use crate::bandit::{BernoulliEnv, PosteriorState, RegretTrace};
use crate::error::{invalid, Error, Result};

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep`: `splitmix64(splitmix64(base) ^ rep)`.
///
/// Depends only on the pair, so adding replications never changes earlier ones.
pub fn replication_seed(base_seed: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(base_seed) ^ rep)
}

/// One agent against one environment and scheme, fully resolved.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub env: BernoulliEnv,
    pub agent: AgentSpec,
    pub scheme: ApproxScheme,
    pub horizon: u64,
    pub base_seed: u64,
    agent_schedule: Option<QuantileSchedule>,
    scheme_schedule: Option<QuantileSchedule>,
}

impl RunSpec {
    /// `scheme_schedule` is what the UCB adversary aims at; defaults to the agent's own.
    pub fn new(
        env: BernoulliEnv,
        agent: AgentSpec,
        scheme: ApproxScheme,
        horizon: u64,
        base_seed: u64,
        scheme_schedule: Option<QuantileSchedule>,
    ) -> Result<Self> {
        scheme.validate()?;
        if horizon < 1 {
            return Err(invalid("horizon must be at least 1"));
        }
        let agent_schedule = agent.schedule(horizon)?;
        let scheme_schedule = scheme_schedule.or(agent_schedule);
        Ok(RunSpec {
            env,
            agent,
            scheme,
            horizon,
            base_seed,
            agent_schedule,
            scheme_schedule,
        })
    }

    pub fn agent_schedule(&self) -> Option<&QuantileSchedule> {
        self.agent_schedule.as_ref()
    }

    pub fn scheme_schedule(&self) -> Option<&QuantileSchedule> {
        self.scheme_schedule.as_ref()
    }

    /// Builds one run per agent listed in `cfg`.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Vec<Self>> {
        let env = BernoulliEnv::new(cfg.mu.clone())?;
        cfg.agents
            .iter()
            .map(|agent| {
                let sched = cfg.scheme_schedule(agent)?;
                let scheme = cfg.scheme.resolve(sched.as_ref())?;
                RunSpec::new(env.clone(), *agent, scheme, cfg.horizon, cfg.base_seed, sched)
            })
            .collect()
    }
}

/// Final posterior state of a replication alongside its trace.
#[derive(Debug, Clone)]
pub struct ReplicationOutcome {
    pub trace: RegretTrace,
    pub state: PosteriorState,
}

pub fn run_replication(spec: &RunSpec, rep: u64) -> Result<RegretTrace> {
    run_replication_full(spec, rep).map(|o| o.trace)
}

pub fn run_replication_full(spec: &RunSpec, rep: u64) -> Result<ReplicationOutcome> {
    let seed = replication_seed(spec.base_seed, rep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.env.num_arms();
    let horizon = spec.horizon as usize;
    let mut state = PosteriorState::new(k);
    let mut cum_regret = Vec::with_capacity(horizon);
    let mut actions = Vec::with_capacity(horizon);
    for t in 1..=spec.horizon {
        let posteriors = approx_posteriors(&spec.scheme, &state, t - 1, spec.scheme_schedule.as_ref())?;
        let arm = match &spec.agent_schedule {
            None => select_thompson(&posteriors, &mut rng),
            Some(s) => select_ebucb(&posteriors, t, s, &mut rng),
        };
        let reward = spec.env.pull(arm, &mut rng)?;
        state.update(arm, reward);
        actions.push(arm);
        cum_regret.push(spec.env.pseudo_regret(state.pulls()));
    }
    Ok(ReplicationOutcome {
        trace: RegretTrace {
            horizon,
            cum_regret,
            pulls: state.pulls().to_vec(),
            actions,
            seed,
        },
        state,
    })
}

/// Runs replications `0..reps` on `pool`, returning them in index order.
pub fn run_replications(spec: &RunSpec, reps: u64, pool: &rayon::ThreadPool) -> Result<Vec<ReplicationOutcome>> {
    pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|rep| run_replication_full(spec, rep))
            .collect()
    })
}

pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    builder
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))
}

/// Pointwise mean and standard error over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub agent: String,
    pub scheme: String,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `√R`; zero when `R = 1`.
    pub stderr: Vec<f64>,
}

pub fn aggregate(agent: &str, scheme: &str, traces: &[RegretTrace]) -> Result<AggregateResult> {
    let first = traces.first().ok_or_else(|| invalid("nothing to aggregate"))?;
    let horizon = first.cum_regret.len();
    if let Some(bad) = traces.iter().find(|t| t.cum_regret.len() != horizon) {
        return Err(Error::HorizonMismatch {
            expected: horizon,
            found: bad.cum_regret.len(),
        });
    }
    let n = traces.len() as f64;
    let mut mean = vec![0.0; horizon];
    let mut stderr = vec![0.0; horizon];
    for i in 0..horizon {
        // Shifting by the first trace keeps identical traces exact.
        let x0 = first.cum_regret[i];
        let m = x0 + traces.iter().map(|t| t.cum_regret[i] - x0).sum::<f64>() / n;
        mean[i] = m;
        if traces.len() > 1 {
            let var = traces.iter().map(|t| (t.cum_regret[i] - m).powi(2)).sum::<f64>() / (n - 1.0);
            stderr[i] = (var / n).sqrt();
        }
    }
    Ok(AggregateResult {
        agent: agent.to_string(),
        scheme: scheme.to_string(),
        mean,
        stderr,
    })
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
