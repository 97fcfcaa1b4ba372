//! Simplified Lode Runner movement model and beatability search.
//!
//! The model has no enemies, no jumping and no dig bookkeeping: digging is a
//! straight pass down through diggable ground at cost 4. A level is beatable
//! when every treasure is reachable from the spawn within the state budget.

mod astar;
mod connectivity;
mod movement;
mod spawn;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::level::{COLS, ROWS};

pub use astar::{astar_solve, solve_level, DEFAULT_BUDGET};
pub use connectivity::{connectivity, reachable_positions};
pub use movement::{is_supported, moves_from, successors, Move, SearchState, TreasureSet, DIG_COST};
pub use spawn::{select_spawn, splitmix64};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    /// Panics when out of the 22 x 32 grid.
    pub fn new(row: usize, col: usize) -> Self {
        assert!(row < ROWS && col < COLS, "position ({row}, {col}) out of bounds");
        Position { row, col }
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        self.row * COLS + self.col
    }

    #[inline]
    pub(crate) fn from_index(index: usize) -> Self {
        Position { row: index / COLS, col: index % COLS }
    }

    pub fn manhattan(self, other: Position) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r{}, c{})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Left,
    Right,
    Up,
    Down,
    Fall,
    Dig,
}

impl Action {
    pub fn cost(self) -> u32 {
        match self {
            Action::Dig => DIG_COST,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub beatable: bool,
    /// Summed action cost of the optimal route, or -1 when unbeatable.
    pub path_cost: i64,
    pub actions: Vec<Action>,
    pub expanded_states: usize,
    pub connectivity: f64,
    pub budget_exhausted: bool,
}

impl SolveResult {
    /// Number of moves on the route; -1 when unbeatable.
    pub fn action_count(&self) -> i64 {
        if self.beatable {
            self.actions.len() as i64
        } else {
            -1
        }
    }

    /// Result for a level that has no spawn tile at all.
    pub fn no_spawn() -> Self {
        SolveResult {
            beatable: false,
            path_cost: -1,
            actions: Vec::new(),
            expanded_states: 0,
            connectivity: 0.0,
            budget_exhausted: false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("level has no empty tile to spawn on")]
    NoEmptyTile,
}
