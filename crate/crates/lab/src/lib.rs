//! Configuration-driven experiment runner and invariant suite for
//! `isodrast-core`.
//!
//! The `isodrast` binary wraps [`checks::run_check_suite`] and
//! [`experiments::run_experiment`]; records are written as JSON lines or CSV,
//! plot series as CSV.

pub mod checks;
pub mod config;
pub mod experiments;
mod fixtures;
pub mod records;

pub use checks::run_check_suite;
pub use config::{ConfigError, ExperimentConfig};
pub use experiments::{run_experiment, Experiment, ExperimentOutput};
pub use records::{Format, Provenance, ResultRecord, Series};
