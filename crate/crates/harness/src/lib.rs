//! Seeded verification runs over `dissip-core`: instance generation, suite
//! execution and CSV/JSON reports.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, FunctionSpec, Suite, Tolerances};
pub use report::{emit_report, Check, Format, Record, ReportError, SuiteSummary, VerificationReport};
pub use runner::{run_experiment, selftest_config, RunError};
