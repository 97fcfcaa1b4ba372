use crate::scalar::Scalar;

use super::{Level, LevelError, TileType, CELLS, COLS, ROWS};

/// Spatial size of the generator's square output.
pub const VOLUME_SIZE: usize = 32;

/// Channel-major (C x H x W) activation tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationVolume<T> {
    shape: [usize; 3],
    data: Vec<T>,
}

impl<T: Scalar> ActivationVolume<T> {
    pub fn zeros(shape: [usize; 3]) -> Self {
        ActivationVolume { shape, data: vec![T::zero(); shape.iter().product()] }
    }

    /// Panics if `data.len()` does not match the shape.
    pub fn from_vec(shape: [usize; 3], data: Vec<T>) -> Self {
        assert_eq!(data.len(), shape.iter().product::<usize>(), "volume data/shape mismatch");
        ActivationVolume { shape, data }
    }

    /// One-hot encoding of a level, zero-padded to 7 x 32 x 32.
    pub fn one_hot(level: &Level) -> Self {
        let mut volume = Self::zeros([TileType::COUNT, VOLUME_SIZE, VOLUME_SIZE]);
        for row in 0..ROWS {
            for col in 0..COLS {
                let channel = level.get(row, col).code() as usize;
                *volume.at_mut(channel, row, col) = T::one();
            }
        }
        volume
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn at(&self, channel: usize, row: usize, col: usize) -> T {
        self.data[(channel * self.shape[1] + row) * self.shape[2] + col]
    }

    #[inline]
    pub fn at_mut(&mut self, channel: usize, row: usize, col: usize) -> &mut T {
        &mut self.data[(channel * self.shape[1] + row) * self.shape[2] + col]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        ActivationVolume { shape: self.shape, data: self.data.iter().map(|v| f(*v)).collect() }
    }
}

/// Argmax decode of a 7 x 32 x 32 generator output into a level.
///
/// Only the top-left 22 x 32 region is read. Ties go to the lowest tile code.
pub fn decode_one_hot<T: Scalar>(volume: &ActivationVolume<T>) -> Result<Level, LevelError> {
    let expected = [TileType::COUNT, VOLUME_SIZE, VOLUME_SIZE];
    if volume.shape() != expected {
        return Err(LevelError::VolumeShape { expected, found: volume.shape() });
    }
    let mut tiles = [TileType::Empty; CELLS];
    for row in 0..ROWS {
        for col in 0..COLS {
            let mut best = 0;
            let mut best_value = T::neg_infinity();
            for channel in 0..TileType::COUNT {
                let value = volume.at(channel, row, col);
                if !value.is_finite() {
                    return Err(LevelError::NonFiniteActivation { channel, row, col });
                }
                if value > best_value {
                    best = channel;
                    best_value = value;
                }
            }
            tiles[row * COLS + col] = TileType::ALL[best];
        }
    }
    Ok(Level::from_tiles(tiles))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHAPE: [usize; 3] = [TileType::COUNT, VOLUME_SIZE, VOLUME_SIZE];

    #[test]
    fn dominant_channel_everywhere() {
        let mut volume = ActivationVolume::<f32>::zeros(SHAPE);
        for row in 0..VOLUME_SIZE {
            for col in 0..VOLUME_SIZE {
                *volume.at_mut(4, row, col) = 0.5;
            }
        }
        assert_eq!(decode_one_hot(&volume).unwrap(), Level::filled(TileType::Ladder));
    }

    #[test]
    fn all_zero_ties_to_empty() {
        let volume = ActivationVolume::<f64>::zeros(SHAPE);
        assert_eq!(decode_one_hot(&volume).unwrap(), Level::filled(TileType::Empty));
    }

    #[test]
    fn padding_rows_are_ignored() {
        let mut volume = ActivationVolume::<f32>::zeros(SHAPE);
        for row in ROWS..VOLUME_SIZE {
            *volume.at_mut(6, row, 0) = f32::MAX;
        }
        assert_eq!(decode_one_hot(&volume).unwrap(), Level::filled(TileType::Empty));
    }

    #[test]
    fn non_finite_rejected() {
        let mut volume = ActivationVolume::<f32>::zeros(SHAPE);
        *volume.at_mut(2, 3, 4) = f32::NAN;
        assert!(matches!(decode_one_hot(&volume), Err(LevelError::NonFiniteActivation { channel: 2, row: 3, col: 4 })));
    }

    #[test]
    fn wrong_shape_rejected() {
        let volume = ActivationVolume::<f32>::zeros([6, 32, 32]);
        assert!(matches!(decode_one_hot(&volume), Err(LevelError::VolumeShape { .. })));
    }

    #[test]
    fn one_hot_decodes_back() {
        let mut level = Level::filled(TileType::Rope);
        level.set(21, 31, TileType::Gold);
        level.set(0, 0, TileType::SolidGround);
        let volume = ActivationVolume::<f32>::one_hot(&level);
        assert_eq!(decode_one_hot(&volume).unwrap(), level);
        let padding_sum: f32 = (0..TileType::COUNT)
            .flat_map(|c| (ROWS..VOLUME_SIZE).map(move |r| (c, r)))
            .map(|(c, r)| (0..VOLUME_SIZE).map(|x| volume.at(c, r, x)).sum::<f32>())
            .sum();
        assert_eq!(padding_sum, 0.0);
    }
}
