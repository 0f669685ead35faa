//! Experiment configuration, execution, export and plotting.

pub mod cli;
pub mod config;
pub mod export;
pub mod run;
pub mod svg;
pub mod verify;

pub use config::{ExperimentConfig, SchemeConfig, SchemeKind};
pub use run::{aggregate, replication_seed, run_replication, AggregateResult, RunSpec};
