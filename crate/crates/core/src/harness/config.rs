//! Flat `key = value` experiment files.
//!
//! ```text
//! # mixture comparison on two arms
//! name = p2_w09
//! agents = ts, bucb, ebucb
//! zeta = 2
//! c = 0
//! scheme = mixture
//! w = 0.9
//! gamma_scale = 2
//! mu = 0.7, 0.3
//! horizon = 5000
//! replications = 10
//! seed = 1
//! ```

use std::path::{Path, PathBuf};

use crate::agents::{AgentSpec, QuantileSchedule};
use crate::approx::{r_for_switch_after, ApproxScheme, DivergenceBudget};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Exact,
    Mixture,
    TsAdversary,
    UcbAdversary,
}

/// Scheme as written in the file; the UCB adversary may be given by its switch time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub w: Option<f64>,
    pub gamma_scale: Option<f64>,
    pub r: Option<f64>,
    /// Target step after which the UCB adversary captures every choice; sets `r = 1/γ_{t0}`.
    pub t0: Option<u64>,
}

impl SchemeConfig {
    /// Concrete scheme for an agent whose quantile schedule (or the adversary's) is `schedule`.
    pub fn resolve(&self, schedule: Option<&QuantileSchedule>) -> Result<ApproxScheme> {
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| invalid(format!("scheme needs `{key}`")));
        let scheme = match self.kind {
            SchemeKind::Exact => ApproxScheme::Exact,
            SchemeKind::Mixture => ApproxScheme::Mixture {
                w: need(self.w, "w")?,
                gamma_scale: need(self.gamma_scale, "gamma_scale")?,
            },
            SchemeKind::TsAdversary => ApproxScheme::TsAdversary { r: need(self.r, "r")? },
            SchemeKind::UcbAdversary => {
                let r = match (self.r, self.t0) {
                    (Some(r), None) => r,
                    (None, Some(t0)) => {
                        let s = schedule.ok_or_else(|| invalid("t0 needs a quantile schedule"))?;
                        r_for_switch_after(s, t0)?
                    }
                    _ => return Err(invalid("ucb_adversary needs exactly one of `r` and `t0`")),
                };
                ApproxScheme::UcbAdversary { r }
            }
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub agents: Vec<AgentSpec>,
    pub scheme: SchemeConfig,
    /// Schedule the UCB adversary uses when the agent has none (Thompson sampling).
    pub adversary_zeta: f64,
    pub adversary_c: f64,
    pub mu: Vec<f64>,
    pub horizon: u64,
    pub replications: u64,
    pub base_seed: u64,
    pub budget: Option<DivergenceBudget>,
    /// Slack `ξ` of the theoretical `ln T` overlay; drawn only with a budget.
    pub xi: f64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = "experiment".to_string();
        let mut agent_names: Option<Vec<String>> = None;
        let mut zeta = 2.0;
        let mut c = 0.0;
        let mut kind = SchemeKind::Exact;
        let (mut w, mut gamma_scale, mut r, mut t0) = (None, None, None, None);
        let (mut adversary_zeta, mut adversary_c) = (1.0, 0.0);
        let mut mu = None;
        let mut horizon = None;
        let mut replications = 10;
        let mut base_seed = 0;
        let (mut epsilon, mut alpha1, mut alpha2) = (None, None, None);
        let mut xi = 0.1;
        let mut out_dir = PathBuf::from("results");

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| Error::Config { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = |v: &str| v.parse::<f64>().map_err(|e| err(format!("`{key}`: {e}")));
            let int = |v: &str| v.parse::<u64>().map_err(|e| err(format!("`{key}`: {e}")));
            match key {
                "name" => name = value.to_string(),
                "agent" | "agents" => {
                    agent_names = Some(value.split(',').map(|s| s.trim().to_lowercase()).collect());
                }
                "zeta" => zeta = float(value)?,
                "c" => c = float(value)?,
                "scheme" => {
                    kind = match value.to_lowercase().as_str() {
                        "exact" => SchemeKind::Exact,
                        "mixture" => SchemeKind::Mixture,
                        "ts_adversary" => SchemeKind::TsAdversary,
                        "ucb_adversary" => SchemeKind::UcbAdversary,
                        other => return Err(err(format!("unknown scheme `{other}`"))),
                    }
                }
                "w" => w = Some(float(value)?),
                "gamma_scale" => gamma_scale = Some(float(value)?),
                "r" => r = Some(float(value)?),
                "t0" => t0 = Some(int(value)?),
                "adv_zeta" => adversary_zeta = float(value)?,
                "adv_c" => adversary_c = float(value)?,
                "mu" => {
                    let parsed: std::result::Result<Vec<f64>, _> = value.split(',').map(|s| s.trim().parse()).collect();
                    mu = Some(parsed.map_err(|e| err(format!("`mu`: {e}")))?);
                }
                "horizon" => horizon = Some(int(value)?),
                "replications" => replications = int(value)?,
                "seed" => base_seed = int(value)?,
                "epsilon" => epsilon = Some(float(value)?),
                "alpha1" => alpha1 = Some(float(value)?),
                "alpha2" => alpha2 = Some(float(value)?),
                "xi" => xi = float(value)?,
                "out_dir" => out_dir = PathBuf::from(value),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        let missing = |key: &str| Error::Config {
            line: 0,
            msg: format!("missing required key `{key}`"),
        };
        let agents = agent_names
            .ok_or_else(|| missing("agents"))?
            .iter()
            .map(|a| match a.as_str() {
                "ts" | "thompson" => Ok(AgentSpec::ThompsonSampling),
                "bucb" => Ok(AgentSpec::Bucb { c }),
                "ebucb" => Ok(AgentSpec::Ebucb { zeta, c }),
                other => Err(Error::Config {
                    line: 0,
                    msg: format!("unknown agent `{other}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        if agents.is_empty() {
            return Err(missing("agents"));
        }
        let horizon = horizon.ok_or_else(|| missing("horizon"))?;
        if horizon < 1 || replications < 1 {
            return Err(Error::Config {
                line: 0,
                msg: "horizon and replications must be at least 1".into(),
            });
        }
        let budget = match (epsilon, alpha1, alpha2) {
            (None, None, None) => None,
            (Some(e), Some(a1), Some(a2)) => Some(DivergenceBudget::new(e, a1, a2)?),
            _ => {
                return Err(Error::Config {
                    line: 0,
                    msg: "a budget needs all of epsilon, alpha1 and alpha2".into(),
                })
            }
        };
        let cfg = ExperimentConfig {
            name,
            agents,
            scheme: SchemeConfig {
                kind,
                w,
                gamma_scale,
                r,
                t0,
            },
            adversary_zeta,
            adversary_c,
            mu: mu.ok_or_else(|| missing("mu"))?,
            horizon,
            replications,
            base_seed,
            budget,
            xi,
            out_dir,
        };
        // Surface schedule and scheme errors now rather than mid-run.
        crate::bandit::BernoulliEnv::new(cfg.mu.clone())?;
        for agent in &cfg.agents {
            let schedule = cfg.scheme_schedule(agent)?;
            cfg.scheme.resolve(schedule.as_ref())?;
        }
        Ok(cfg)
    }

    /// Schedule the scheme sees for `agent`: the agent's own, else the adversary default.
    pub fn scheme_schedule(&self, agent: &AgentSpec) -> Result<Option<QuantileSchedule>> {
        match agent.schedule(self.horizon)? {
            Some(s) => Ok(Some(s)),
            None if self.scheme.kind == SchemeKind::UcbAdversary => {
                QuantileSchedule::new(self.adversary_zeta, self.adversary_c, self.horizon).map(Some)
            }
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIXTURE_PRESET: &str = "\
# comment line
name = p2_w09
agents = ts, bucb, ebucb
zeta = 2
c = 0
scheme = mixture   # trailing comment
w = 0.9
gamma_scale = 2
mu = 0.7, 0.3
horizon = 5000
replications = 10
seed = 1
";

    #[test]
    fn parses_mixture_preset() {
        let cfg = ExperimentConfig::parse(MIXTURE_PRESET).unwrap();
        assert_eq!(cfg.name, "p2_w09");
        assert_eq!(
            cfg.agents,
            vec![
                AgentSpec::ThompsonSampling,
                AgentSpec::Bucb { c: 0.0 },
                AgentSpec::Ebucb { zeta: 2.0, c: 0.0 }
            ]
        );
        assert_eq!(cfg.mu, vec![0.7, 0.3]);
        assert_eq!(cfg.horizon, 5000);
        let s = cfg.scheme.resolve(None).unwrap();
        assert_eq!(s, ApproxScheme::Mixture { w: 0.9, gamma_scale: 2.0 });
        assert!(cfg.budget.is_none());
    }

    #[test]
    fn t0_resolves_per_schedule() {
        let text = "agents = bucb\nscheme = ucb_adversary\nt0 = 100\nmu = 0.7, 0.3\nhorizon = 1000\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        let sched = cfg.scheme_schedule(&cfg.agents[0]).unwrap();
        match cfg.scheme.resolve(sched.as_ref()).unwrap() {
            ApproxScheme::UcbAdversary { r } => assert!((1.0 / r - 0.99).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_line_numbers() {
        let err = ExperimentConfig::parse("agents = ts\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err}");
        let err = ExperimentConfig::parse("agents = ts\nhorizon = abc\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = ExperimentConfig::parse("agents = ts\nmu = 0.5, 0.4\n").unwrap_err();
        assert!(err.to_string().contains("horizon"));
        let err = ExperimentConfig::parse("agents = ts\nno equals sign\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
    }

    #[test]
    fn rejects_invalid_scheme_values() {
        assert!(ExperimentConfig::parse("agents = ts\nscheme = ts_adversary\nr = 0.5\nmu = 0.7,0.3\nhorizon = 10\n").is_err());
        assert!(ExperimentConfig::parse("agents = ts\nscheme = mixture\nw = 0.5\nmu = 0.7,0.3\nhorizon = 10\n").is_err());
        assert!(ExperimentConfig::parse("agents = ts\nepsilon = 0.1\nmu = 0.7,0.3\nhorizon = 10\n").is_err());
    }
}
