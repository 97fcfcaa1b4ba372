use std::collections::VecDeque;

use crate::level::{Level, CELLS};

use super::{moves_from, Position};

/// Every position reachable from `spawn` under the movement model, ignoring
/// treasure. Dug-through ground cells are included.
pub fn reachable_positions(level: &Level, spawn: Position) -> Vec<bool> {
    let mut seen = vec![false; CELLS];
    let mut queue = VecDeque::from([spawn]);
    seen[spawn.index()] = true;
    while let Some(pos) = queue.pop_front() {
        for m in moves_from(level, pos) {
            if !seen[m.to.index()] {
                seen[m.to.index()] = true;
                queue.push_back(m.to);
            }
        }
    }
    seen
}

/// Fraction of traversable (non-ground) tiles reachable from `spawn`.
pub fn connectivity(level: &Level, spawn: Position) -> f64 {
    let seen = reachable_positions(level, spawn);
    let tiles = level.tiles();
    let traversable = tiles.iter().filter(|t| !t.is_ground()).count();
    if traversable == 0 {
        return 0.0;
    }
    let reached = tiles.iter().zip(&seen).filter(|(t, s)| **s && !t.is_ground()).count();
    reached as f64 / traversable as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::{TileType, COLS, ROWS};

    #[test]
    fn single_open_row() {
        let mut level = Level::filled(TileType::SolidGround);
        for col in 0..COLS {
            level.set(10, col, TileType::Empty);
        }
        assert_eq!(connectivity(&level, Position::new(10, 17)), 1.0);
    }

    #[test]
    fn two_sealed_chambers() {
        let mut level = Level::filled(TileType::SolidGround);
        // Chamber a: 6 floor cells; chamber b: 10 floor cells.
        for col in 1..7 {
            level.set(5, col, TileType::Empty);
        }
        for col in 12..22 {
            level.set(15, col, TileType::Empty);
        }
        assert_eq!(connectivity(&level, Position::new(5, 3)), 6.0 / 16.0);
        assert_eq!(connectivity(&level, Position::new(15, 20)), 10.0 / 16.0);
    }

    #[test]
    fn dug_cells_do_not_count() {
        let mut level = Level::filled(TileType::SolidGround);
        for col in 0..COLS {
            level.set(5, col, TileType::Empty);
            level.set(7, col, TileType::Empty);
        }
        level.set(6, 4, TileType::DiggableGround);
        let value = connectivity(&level, Position::new(5, 0));
        assert_eq!(value, 1.0);
        assert!(reachable_positions(&level, Position::new(5, 0))[6 * COLS + 4]);
        assert_eq!(ROWS, 22);
    }
}
