use crate::level::{Level, TileType};

use super::{Position, SolveError};

/// One step of the splitmix64 generator; returns the output for `state`
/// after advancing it.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Picks the spawn among the level's empty tiles, seeded by the first latent
/// value so that the spawn is a pure function of the genotype.
pub fn select_spawn(level: &Level, first_latent: f64) -> Result<Position, SolveError> {
    let empties: Vec<(usize, usize)> = level.positions_of(TileType::Empty).collect();
    if empties.is_empty() {
        return Err(SolveError::NoEmptyTile);
    }
    let mut state = first_latent.to_bits();
    let draw = splitmix64(&mut state);
    let (row, col) = empties[(draw % empties.len() as u64) as usize];
    Ok(Position { row, col })
}
