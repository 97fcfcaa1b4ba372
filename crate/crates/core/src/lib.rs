//! Quality-diversity search over the latent space of a Lode Runner level
//! generator.
//!
//! Latent vectors are mapped to levels by a generator (trained weights or the
//! built-in stub), scored by a budgeted A* beatability search and stored in a
//! 10 x 10 x 10 MAP-Elites archive keyed by enemy count, treasure count and
//! ground fraction.

pub mod experiment;
pub mod generator;
pub mod level;
pub mod qd;
pub mod scalar;
pub mod solver;

pub use generator::{GeneratorWeights, LatentVector, LevelGenerator, StubGenerator, WeightsGenerator};
pub use level::{ActivationVolume, Level, LevelStats, TileType};
pub use scalar::Scalar;
pub use solver::{Position, SolveResult};

/// Generator weights in the interchange precision.
pub type Weights = GeneratorWeights<f32>;
/// Single-precision activation volume produced by inference.
pub type Volume = ActivationVolume<f32>;
/// Genotype latent vector.
pub type Latent = LatentVector<f64>;
/// Generator backed by single-precision weights.
pub type NetGenerator = WeightsGenerator<f32>;
