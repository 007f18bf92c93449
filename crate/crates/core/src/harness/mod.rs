//! Experiment harness: metrics, configuration, trial runner, CSV output and
//! the diagnostic suites behind `fracsplit verify`.

pub mod config;
pub mod csv;
pub mod metrics;
pub mod runner;
pub mod verify;

pub use config::{Algorithm, ExperimentConfig, MethodConfig, Overrides};
pub use runner::{run_experiment, run_method, ExperimentResult, MethodRun, MethodSummary};
