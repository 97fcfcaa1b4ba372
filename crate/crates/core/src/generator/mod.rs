//! Latent vector to level mapping: exported-weight inference and a stub.

mod forward;
mod stub;
mod weights;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::level::{decode_one_hot, Level, LevelError};
use crate::scalar::Scalar;

pub use forward::{batch_norm, conv_transpose2d, forward};
pub use stub::{StubGenerator, FIXTURE_NAMES};
pub use weights::{load_weights, save_weights, GeneratorWeights, Layer, LayerRecord, TensorRecord, BN_EPS};

pub const LATENT_SIZE: usize = 10;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("weights blob too short: tensor {tensor} needs bytes up to {needed}, blob has {available}")]
    TruncatedBlob { tensor: String, needed: usize, available: usize },
    #[error("latent component {index} = {value} outside [-1, 1]")]
    LatentOutOfBounds { index: usize, value: f64 },
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Level(#[from] LevelError),
}

/// Ten latent values, each within [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
#[serde(transparent)]
pub struct LatentVector<T> {
    values: [T; LATENT_SIZE],
}

impl<T: Scalar> LatentVector<T> {
    pub fn new(values: [T; LATENT_SIZE]) -> Result<Self, GeneratorError> {
        for (index, v) in values.iter().enumerate() {
            if !(*v >= -T::one() && *v <= T::one()) {
                return Err(GeneratorError::LatentOutOfBounds { index, value: v.widen() });
            }
        }
        Ok(LatentVector { values })
    }

    /// Clamps every component into [-1, 1]; NaN becomes 0.
    pub fn clamped(values: [T; LATENT_SIZE]) -> Self {
        let values = values.map(|v| if v.is_nan() { T::zero() } else { v.max(-T::one()).min(T::one()) });
        LatentVector { values }
    }

    pub fn zeros() -> Self {
        LatentVector { values: [T::zero(); LATENT_SIZE] }
    }

    pub fn values(&self) -> &[T; LATENT_SIZE] {
        &self.values
    }

    pub fn first(&self) -> T {
        self.values[0]
    }

    pub fn cast<U: Scalar>(&self) -> LatentVector<U> {
        LatentVector { values: self.values.map(|v| U::narrow(v.widen())) }
    }
}

/// Genotype-to-phenotype mapping.
pub trait LevelGenerator: Send + Sync {
    fn generate(&self, latent: &LatentVector<f64>) -> Result<Level, GeneratorError>;
}

/// Generator backed by exported network weights.
#[derive(Clone, Debug)]
pub struct WeightsGenerator<T> {
    weights: GeneratorWeights<T>,
}

impl<T: Scalar> WeightsGenerator<T> {
    pub fn new(weights: GeneratorWeights<T>) -> Self {
        WeightsGenerator { weights }
    }

    pub fn load(
        manifest: impl AsRef<std::path::Path>,
        blob: impl AsRef<std::path::Path>,
    ) -> Result<Self, GeneratorError> {
        Ok(WeightsGenerator { weights: load_weights(manifest, blob)? })
    }

    pub fn weights(&self) -> &GeneratorWeights<T> {
        &self.weights
    }
}

impl<T: Scalar> LevelGenerator for WeightsGenerator<T> {
    fn generate(&self, latent: &LatentVector<f64>) -> Result<Level, GeneratorError> {
        generate_level(&self.weights, &latent.cast())
    }
}

/// Always produces the same level; handy for pinning a known phenotype.
#[derive(Clone, Debug)]
pub struct FixedGenerator(pub Level);

impl LevelGenerator for FixedGenerator {
    fn generate(&self, _latent: &LatentVector<f64>) -> Result<Level, GeneratorError> {
        Ok(self.0.clone())
    }
}

/// Forward pass followed by the argmax decode.
pub fn generate_level<T: Scalar>(
    weights: &GeneratorWeights<T>,
    latent: &LatentVector<T>,
) -> Result<Level, GeneratorError> {
    Ok(decode_one_hot(&forward(weights, latent))?)
}
