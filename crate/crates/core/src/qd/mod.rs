//! MAP-Elites over generator latent vectors.

mod archive;
mod bins;
mod engine;
mod operators;

use thiserror::Error;

use crate::generator::GeneratorError;

pub use archive::{Archive, ArchiveMetrics, EvalRecord, Genotype, Placement, SolveSummary};
pub use bins::{bin_for, BinIndex, BINS_PER_AXIS, CELL_COUNT};
pub use engine::{evaluate, fitness, run_map_elites, run_map_elites_with, EngineConfig, RunOutput, Snapshot};
pub use operators::{mutate_gene, polynomial_mutation, single_point_crossover, DEFAULT_ETA};

#[derive(Debug, Error)]
pub enum QdError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("archive line {line}: {reason}")]
    ArchiveSchemaMismatch { line: usize, reason: String },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}
