use std::fmt;

use serde::{Deserialize, Serialize};

use crate::level::LevelStats;

pub const BINS_PER_AXIS: usize = 10;
pub const CELL_COUNT: usize = BINS_PER_AXIS * BINS_PER_AXIS * BINS_PER_AXIS;

/// Archive cell coordinates: enemy group, treasure group, ground decile.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinIndex {
    pub enemy: u8,
    pub treasure: u8,
    pub ground: u8,
}

impl BinIndex {
    pub fn new(enemy: usize, treasure: usize, ground: usize) -> Option<Self> {
        let ok = |v: usize| v < BINS_PER_AXIS;
        (ok(enemy) && ok(treasure) && ok(ground)).then_some(BinIndex {
            enemy: enemy as u8,
            treasure: treasure as u8,
            ground: ground as u8,
        })
    }

    /// Flat index, ground-major then treasure then enemy.
    pub fn cell(self) -> usize {
        (usize::from(self.ground) * BINS_PER_AXIS + usize::from(self.treasure)) * BINS_PER_AXIS
            + usize::from(self.enemy)
    }

    pub fn from_cell(cell: usize) -> Self {
        assert!(cell < CELL_COUNT, "cell {cell} out of range");
        BinIndex {
            enemy: (cell % BINS_PER_AXIS) as u8,
            treasure: (cell / BINS_PER_AXIS % BINS_PER_AXIS) as u8,
            ground: (cell / (BINS_PER_AXIS * BINS_PER_AXIS)) as u8,
        }
    }
}

impl fmt::Debug for BinIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(e{}, t{}, g{})", self.enemy, self.treasure, self.ground)
    }
}

/// Enemies in pairs {0,1}..{16,17} then 18+; treasure in fives up to 44
/// then 45+; ground fraction in deciles with 100% folded into the last.
pub fn bin_for(stats: &LevelStats) -> BinIndex {
    let last = BINS_PER_AXIS - 1;
    let ground = (stats.ground_fraction * 10.0).floor().max(0.0) as usize;
    BinIndex {
        enemy: (stats.enemy_count / 2).min(last) as u8,
        treasure: (stats.treasure_count / 5).min(last) as u8,
        ground: ground.min(last) as u8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(enemy_count: usize, treasure_count: usize, ground_fraction: f64) -> LevelStats {
        LevelStats { enemy_count, treasure_count, ground_fraction }
    }

    fn bin(e: usize, t: usize, g: f64) -> (u8, u8, u8) {
        let b = bin_for(&stats(e, t, g));
        (b.enemy, b.treasure, b.ground)
    }

    #[test]
    fn examples() {
        assert_eq!(bin(17, 44, 0.999), (8, 8, 9));
        assert_eq!(bin(0, 0, 0.0), (0, 0, 0));
        assert_eq!(bin(25, 45, 1.0), (9, 9, 9));
    }

    #[test]
    fn cell_round_trip() {
        for cell in 0..CELL_COUNT {
            assert_eq!(BinIndex::from_cell(cell).cell(), cell);
        }
        assert!(BinIndex::new(10, 0, 0).is_none());
    }
}
