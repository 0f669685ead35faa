//! Command-line front end. Exit codes: 0 success, 1 failed check, 2 usage or config error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::config::{ExperimentConfig, SchemeKind};
use super::export::{load_for_plot, write_aggregates, write_labelled_traces, LabelledTrace};
use super::run::{aggregate, run_replications, thread_pool, AggregateResult, RunSpec};
use super::svg::{emit_svg_with, ChartOptions, Marker};
use super::verify::{adversary_suite, all_pass, divergence_suite, shift_suite, AdversaryKind, Check};
use crate::agents::theoretical_log_coefficient;
use crate::approx::{ucb_adversary_switch_time, verify_budget, SwitchTime};
use crate::divergence::DEFAULT_TOL;
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ebucb", version, about = "Bayesian bandits under approximate posteriors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AdversaryArg {
    Ts,
    Ucb,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate every agent of a config file and write CSV and SVG results.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads; defaults to the number of logical cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the base seed of the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closed forms, dual-route agreement and symmetry of the divergence engine.
    VerifyDivergence {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Soundness and attainment of the quantile-shift bounds on random extremal pairs.
    VerifyShift {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Divergence budget of an adversarial posterior over random posterior states.
    AdversaryCheck {
        #[arg(long, value_enum)]
        scheme: AdversaryArg,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Adversary ratio; defaults to 0.99 times the largest admissible one.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 50)]
        states: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Chart one or more trace or aggregate CSV files.
    Plot {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "cumulative regret")]
        title: String,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn report(checks: &[Check]) -> i32 {
    for c in checks {
        println!("{c}");
    }
    if all_pass(checks) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run {
            config,
            out_dir,
            jobs,
            seed,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(dir) = out_dir {
                cfg.out_dir = dir;
            }
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            cmd_run(&cfg, jobs)
        }
        Command::VerifyDivergence { trials, tol, seed } => Ok(report(&divergence_suite(trials, tol, seed)?)),
        Command::VerifyShift { trials, seed } => Ok(report(&shift_suite(trials, seed)?)),
        Command::AdversaryCheck {
            scheme,
            epsilon,
            alpha,
            r,
            states,
            seed,
        } => {
            let kind = match scheme {
                AdversaryArg::Ts => AdversaryKind::Ts,
                AdversaryArg::Ucb => AdversaryKind::Ucb,
            };
            Ok(report(&adversary_suite(kind, epsilon, alpha, r, states, seed)?))
        }
        Command::Plot { inputs, out, title } => {
            let mut results = Vec::new();
            for path in &inputs {
                results.extend(load_for_plot(path)?);
            }
            emit_svg_with(&results, &out, &ChartOptions::titled(&title))?;
            println!("wrote {}", out.display());
            Ok(EXIT_OK)
        }
    }
}

/// Output files of a run, all under the configured directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutputs {
    pub traces: PathBuf,
    pub aggregate: PathBuf,
    pub svg: PathBuf,
}

impl RunOutputs {
    pub fn new(dir: &Path, name: &str) -> Self {
        RunOutputs {
            traces: dir.join(format!("{name}_traces.csv")),
            aggregate: dir.join(format!("{name}_aggregate.csv")),
            svg: dir.join(format!("{name}.svg")),
        }
    }
}

/// Runs `cfg` and writes its trace CSV, aggregate CSV and chart.
///
/// With a budget in the config, the final posterior state of every
/// replication is checked against it and reported as CHECK lines.
pub fn cmd_run(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<i32> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| Error::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;
    let pool = thread_pool(jobs)?;
    let specs = RunSpec::from_config(cfg)?;
    let mut traces = Vec::new();
    let mut aggregates: Vec<AggregateResult> = Vec::new();
    let mut markers = Vec::new();
    let mut checks = Vec::new();
    for spec in &specs {
        let outcomes = run_replications(spec, cfg.replications, &pool)?;
        let agent = spec.agent.label();
        let scheme = spec.scheme.label();
        let reps: Vec<_> = outcomes.iter().map(|o| o.trace.clone()).collect();
        aggregates.push(aggregate(agent, &scheme, &reps)?);
        for (rep, o) in outcomes.iter().enumerate() {
            traces.push(LabelledTrace {
                agent: agent.to_string(),
                scheme: scheme.clone(),
                rep: rep as u64,
                cum_regret: o.trace.cum_regret.clone(),
            });
        }
        if let (crate::approx::ApproxScheme::UcbAdversary { r }, Some(s)) = (spec.scheme, spec.scheme_schedule()) {
            if let SwitchTime::At(t) = ucb_adversary_switch_time(s, r) {
                // The switch happens at t; the preset's T0 is the step before.
                let label = format!("T0={} ({agent})", t - 1);
                if !markers.iter().any(|m: &Marker| m.t == (t - 1) as f64) {
                    markers.push(Marker {
                        t: (t - 1) as f64,
                        label,
                    });
                }
            }
        }
        if let Some(budget) = &cfg.budget {
            let mut worst: f64 = 0.0;
            let mut within = true;
            for o in &outcomes {
                for arm in 0..o.state.num_arms() {
                    let rep = verify_budget(&spec.scheme, &o.state, cfg.horizon, arm, spec.scheme_schedule(), budget, 1e-6)?;
                    worst = worst.max(rep.d_alpha1).max(rep.d_alpha2);
                    within &= rep.within;
                }
            }
            let mut c = Check::at_most(format!("budget_{agent}"), worst, budget.epsilon + 1e-6);
            c.pass &= within;
            checks.push(c);
        }
    }
    let out = RunOutputs::new(&cfg.out_dir, &cfg.name);
    write_labelled_traces(&out.traces, &traces)?;
    write_aggregates(&out.aggregate, &aggregates)?;
    let log_overlay = match &cfg.budget {
        Some(b) => Some(theoretical_log_coefficient(&cfg.mu, b.alpha1, b.alpha2, cfg.xi)?),
        None => None,
    };
    let opts = ChartOptions {
        title: cfg.name.clone(),
        markers: if cfg.scheme.kind == SchemeKind::UcbAdversary { markers } else { vec![] },
        log_overlay,
    };
    emit_svg_with(&aggregates, &out.svg, &opts)?;
    for a in &aggregates {
        let last = a.mean.len() - 1;
        println!(
            "{} {} final_regret {:.4} stderr {:.4}",
            a.agent, a.scheme, a.mean[last], a.stderr[last]
        );
    }
    println!("wrote {} {} {}", out.traces.display(), out.aggregate.display(), out.svg.display());
    Ok(report(&checks))
}
