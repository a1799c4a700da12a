//! Experiment orchestration and file export.

pub mod config;
pub mod output;
pub mod studies;
pub mod verify;

pub use config::{InitialData, OutputSpec, Profile, Scenario, ScenarioConfig, StepperSpec};
pub use studies::{
    convergence_study, random_small_data_configs, run_scenario, sweep, uniqueness_probe,
    uniqueness_series, write_scenario_outputs, ConvergenceTable, ScenarioDiagnostics, SweepGrid,
    SweepTable, UniquenessReport,
};
pub use verify::{verify, CheckResult, VerifyReport};

use crate::error::Error;

/// Process exit code for an error: 2 for configuration and argument
/// problems, 3 for solver failures, 1 for I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::InvalidArgument(_) => 2,
        Error::SolverDivergence { .. } | Error::NumericFault { .. } => 3,
        Error::Io(_) => 1,
    }
}
