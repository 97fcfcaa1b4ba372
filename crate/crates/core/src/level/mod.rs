//! Lode Runner levels: tile grid, VGLC text, integer grids and statistics.

mod onehot;
mod stats;
mod tile;
mod vglc;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use onehot::{decode_one_hot, ActivationVolume, VOLUME_SIZE};
pub use stats::LevelStats;
pub use tile::TileType;
pub use vglc::{parse_vglc, render_text, TextLayout};

pub const ROWS: usize = 22;
pub const COLS: usize = 32;
pub const CELLS: usize = ROWS * COLS;

/// Row-major integer grid, the JSON training-set element format.
pub type IntGrid = Vec<Vec<u8>>;

#[derive(Debug, Error)]
pub enum LevelError {
    #[error("expected {expected} rows, found {found}")]
    WrongRowCount { expected: usize, found: usize },
    #[error("row {row}: expected {expected} columns, found {found}")]
    WrongRowLength { row: usize, expected: usize, found: usize },
    #[error("unknown tile character {ch:?} at row {row}, column {col}")]
    UnknownCharacter { row: usize, col: usize, ch: char },
    #[error("tile code {code} out of range 0-6 at row {row}, column {col}")]
    OutOfRangeCode { row: usize, col: usize, code: i64 },
    #[error("activation volume has shape {found:?}, expected {expected:?}")]
    VolumeShape { expected: [usize; 3], found: [usize; 3] },
    #[error("non-finite activation at channel {channel}, row {row}, column {col}")]
    NonFiniteActivation { channel: usize, row: usize, col: usize },
    #[error("invalid level JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl LevelError {
    /// True for either flavour of dimension mismatch.
    pub fn is_wrong_dimensions(&self) -> bool {
        matches!(self, LevelError::WrongRowCount { .. } | LevelError::WrongRowLength { .. })
    }
}

/// A 22 x 32 Lode Runner level, row 0 at the top.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Level {
    tiles: [TileType; CELLS],
}

impl Level {
    pub fn filled(tile: TileType) -> Self {
        Level { tiles: [tile; CELLS] }
    }

    pub fn from_tiles(tiles: [TileType; CELLS]) -> Self {
        Level { tiles }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> TileType {
        self.tiles[row * COLS + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, tile: TileType) {
        self.tiles[row * COLS + col] = tile;
    }

    /// Tiles in row-major order.
    pub fn tiles(&self) -> &[TileType; CELLS] {
        &self.tiles
    }

    pub fn rows(&self) -> impl Iterator<Item = &[TileType]> {
        self.tiles.chunks_exact(COLS)
    }

    /// Row-major `(row, col)` coordinates of every tile of the given type.
    pub fn positions_of(&self, tile: TileType) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.tiles.iter().enumerate().filter(move |(_, t)| **t == tile).map(|(i, _)| (i / COLS, i % COLS))
    }

    pub fn count(&self, tile: TileType) -> usize {
        self.tiles.iter().filter(|t| **t == tile).count()
    }

    /// Per-type tile counts indexed by code.
    pub fn histogram(&self) -> [usize; TileType::COUNT] {
        let mut hist = [0; TileType::COUNT];
        for t in &self.tiles {
            hist[t.code() as usize] += 1;
        }
        hist
    }

    pub fn to_int_grid(&self) -> IntGrid {
        self.rows().map(|row| row.iter().map(|t| t.code()).collect()).collect()
    }

    /// Builds a level from any row-major integer matrix; every entry must be a
    /// valid tile code and the matrix must be exactly 22 x 32.
    pub fn from_int_grid<R, V>(grid: &[R]) -> Result<Self, LevelError>
    where
        R: AsRef<[V]>,
        V: Copy + Into<i64>,
    {
        if grid.len() != ROWS {
            return Err(LevelError::WrongRowCount { expected: ROWS, found: grid.len() });
        }
        let mut tiles = [TileType::Empty; CELLS];
        for (row, values) in grid.iter().enumerate() {
            let values = values.as_ref();
            if values.len() != COLS {
                return Err(LevelError::WrongRowLength { row, expected: COLS, found: values.len() });
            }
            for (col, value) in values.iter().enumerate() {
                let code: i64 = (*value).into();
                tiles[row * COLS + col] =
                    TileType::from_code(code).ok_or(LevelError::OutOfRangeCode { row, col, code })?;
            }
        }
        Ok(Level { tiles })
    }

    /// Parses one level in JSON grid form (an array of 22 arrays of 32 codes).
    pub fn from_json(text: &str) -> Result<Self, LevelError> {
        let grid: Vec<Vec<i64>> = serde_json::from_str(text)?;
        Level::from_int_grid(&grid)
    }

    pub fn stats(&self) -> LevelStats {
        LevelStats::of(self)
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Level {{")?;
        for row in self.rows() {
            let line: String = row.iter().map(|t| t.vglc_char()).collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_text(self))
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_int_grid().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let grid = Vec::<Vec<i64>>::deserialize(deserializer)?;
        Level::from_int_grid(&grid).map_err(serde::de::Error::custom)
    }
}

/// Serializes levels as a training-set JSON array of integer grids.
pub fn training_set_json(levels: &[Level]) -> String {
    let grids: Vec<IntGrid> = levels.iter().map(Level::to_int_grid).collect();
    serde_json::to_string(&grids).expect("integer grids always serialize")
}

/// Parses a training-set JSON array of integer grids.
pub fn parse_training_set(text: &str) -> Result<Vec<Level>, LevelError> {
    let grids: Vec<Vec<Vec<i64>>> = serde_json::from_str(text)?;
    grids.iter().map(|g| Level::from_int_grid(g)).collect()
}

/// Reads a level from either VGLC text or a JSON grid, sniffing the first
/// non-blank character.
pub fn parse_level_any(text: &str) -> Result<Level, LevelError> {
    if text.trim_start().starts_with('[') {
        Level::from_json(text)
    } else {
        parse_vglc(text)
    }
}
