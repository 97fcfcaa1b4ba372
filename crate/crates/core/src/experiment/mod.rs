//! Batch experiments: corpus conversion, repeated runs, aggregation and
//! heatmap reports.

mod aggregate;
mod config;
mod corpus;
mod report;
mod runner;

use std::path::PathBuf;

use thiserror::Error;

use crate::generator::GeneratorError;
use crate::level::LevelError;
use crate::qd::QdError;

pub use aggregate::{
    aggregate_csv, aggregate_runs, mean_ci95, metrics_csv, parse_metrics_csv, AggregateRow, MeanCi, AGGREGATE_HEADER,
    METRICS_HEADER,
};
pub use config::{ExperimentConfig, GeneratorSource};
pub use corpus::{load_corpus, natural_key, select_subset, CorpusLevel, Subset};
pub use report::{intensity, CellMean, Heatmap, PGM_CELL_PX, PGM_EMPTY};
pub use runner::{read_archive, run_experiment, write_report, ExperimentSummary, RunArtifacts};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("i/o error on {path}: {source}", path = path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}: {source}")]
    Level { file: String, source: LevelError },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("level subset is empty")]
    EmptySubset,
    #[error("level id {id} outside corpus of {size} levels")]
    UnknownLevelId { id: usize, size: usize },
    #[error("malformed metrics CSV {path}: {reason}")]
    MalformedMetrics { path: String, reason: String },
    #[error(transparent)]
    Qd(#[from] QdError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> ExperimentError {
    let path = path.into();
    move |source| ExperimentError::Io { path, source }
}
