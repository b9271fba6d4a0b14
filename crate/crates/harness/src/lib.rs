//! Experiment harness: configuration files, sweep execution with resume,
//! CSV records and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod execute;
pub mod record;
pub mod report;

pub use config::{parse_config, read_config, ExperimentPlan, PlanKind, RunSpec};
pub use error::{HarnessError, Result};
pub use execute::{execute, execute_with, run_point, workers_from_env, ExecuteReport};
pub use record::{RunRecord, SummaryRow};
pub use report::{evaluate_acceptance, Evidence, Report, Status};
