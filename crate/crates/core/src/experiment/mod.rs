//! Experiment orchestration: configuration, seeded runs persisted as JSON
//! lines, and the tables and plots built from them.

mod config;
mod plot;
mod report;
mod runner;

use std::path::{Path, PathBuf};

pub use config::{derive_seed, load_config, ConfigError, DataConfig, DataFormat, ExperimentConfig, Variant};
pub use plot::{plot_fronts, staircase, FrontPlot};
pub use report::{build_report, payoff, Report, ReportRow, ResultSet};
pub use runner::{
    effective_workers, load_tasks, plan, read_records, run_cell, run_experiment, run_experiment_with, test_front,
    ArchivedProgram, ErrorRecord, ExperimentSummary, Record, RunKey, RunResult, Solution, Task, RESULTS_FILE,
    SCHEMA_VERSION,
};

use crate::data::DataError;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Results(String),
}

impl ExperimentError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Loads every record under `dir` into a [`ResultSet`].
pub fn load_results(dir: &Path) -> Result<ResultSet, ExperimentError> {
    Ok(ResultSet::from_records(read_records(dir)?))
}
