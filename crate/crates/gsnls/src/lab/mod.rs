//! Experiment layer: configuration, ensemble statistics, the four standard
//! experiments and their file outputs.

pub mod config;
pub mod experiments;
pub mod io;
pub mod stats;

pub use config::{ExperimentConfig, ValidationReport};
pub use experiments::{run_experiment, ExperimentName, ExperimentOutcome};
pub use stats::{aldous_statistic, gn_ratio_scan, moment_sup_energy, EnsembleSummary};
