//! Experiment harness for the KP spectral solver: presets, configuration,
//! output formats, experiment runs and the propagation check.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, PerturbationSpec};
pub use run::{run_experiment, validate, RunError, RunSummary, ValidationReport};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const CONSTRAINT: i32 = 3;
    pub const NON_FINITE: i32 = 4;
    pub const VALIDATION: i32 = 5;
}
