use serde::{Deserialize, Serialize};

use super::{Level, TileType, CELLS};

/// Behaviour characteristics used for archive binning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub enemy_count: usize,
    pub treasure_count: usize,
    /// Diggable plus solid ground tiles over all 704 tiles.
    pub ground_fraction: f64,
}

impl LevelStats {
    pub fn of(level: &Level) -> Self {
        let hist = level.histogram();
        let ground = hist[TileType::DiggableGround.code() as usize] + hist[TileType::SolidGround.code() as usize];
        LevelStats {
            enemy_count: hist[TileType::Enemy.code() as usize],
            treasure_count: hist[TileType::Gold.code() as usize],
            ground_fraction: ground as f64 / CELLS as f64,
        }
    }

    /// Number of ground tiles implied by `ground_fraction`.
    pub fn ground_count(&self) -> usize {
        (self.ground_fraction * CELLS as f64).round() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::{COLS, ROWS};

    #[test]
    fn uniform_levels() {
        let empty = Level::filled(TileType::Empty).stats();
        assert_eq!((empty.enemy_count, empty.treasure_count, empty.ground_fraction), (0, 0, 0.0));
        let solid = Level::filled(TileType::SolidGround).stats();
        assert_eq!((solid.enemy_count, solid.treasure_count, solid.ground_fraction), (0, 0, 1.0));
    }

    #[test]
    fn mixed_counts_against_direct_count() {
        let mut level = Level::filled(TileType::Empty);
        // 11 full rows of alternating ground = 352 ground tiles.
        for row in 11..ROWS {
            for col in 0..COLS {
                let t = if col % 2 == 0 { TileType::SolidGround } else { TileType::DiggableGround };
                level.set(row, col, t);
            }
        }
        for col in 0..3 {
            level.set(0, col, TileType::Enemy);
        }
        for col in 10..17 {
            level.set(5, col, TileType::Gold);
        }
        let direct_ground = level.tiles().iter().filter(|t| t.is_ground()).count();
        assert_eq!(direct_ground, 352);
        let stats = level.stats();
        assert_eq!(stats.enemy_count, 3);
        assert_eq!(stats.treasure_count, 7);
        assert_eq!(stats.ground_fraction, 0.5);
        assert_eq!(stats.ground_count(), 352);
    }
}
