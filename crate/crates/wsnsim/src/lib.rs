//! Experiment harness for the `wsn-core` simulator: configuration parsing,
//! grid sweeps over (area size, BS strategy, seed), and CSV result files.

pub mod config;
pub mod error;
pub mod grid;
pub mod output;

pub use config::{parse_config, ConfigError, ExperimentPlan, RunParams};
pub use error::HarnessError;
pub use grid::{run_grid, run_grid_with_jobs, GridRow, MilestoneRecord};
pub use output::{emit_results, read_milestones, summarize, SummaryRow};
