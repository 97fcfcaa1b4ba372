//! Deterministic stand-in for a trained generator.
//!
//! The latent vector is hashed to pick one of six bundled fixture levels, and
//! the positive or negative parts of individual components then add or remove
//! ground (z3), treasure (z2), enemies (z1), ladders (z4) and ropes (z5) at
//! hash-chosen cells. A zero component leaves its feature untouched, so the
//! all-zero latent reproduces a fixture exactly.

use crate::level::{parse_vglc, Level, TileType, CELLS, COLS};
use crate::solver::splitmix64;

use super::{GeneratorError, LatentVector, LevelGenerator};

pub const FIXTURE_NAMES: [&str; 6] = ["ladders", "ropes", "digging", "letters", "vault", "cavern"];

const FIXTURE_TEXT: [&str; 6] = [
    include_str!("fixtures/ladders.txt"),
    include_str!("fixtures/ropes.txt"),
    include_str!("fixtures/digging.txt"),
    include_str!("fixtures/letters.txt"),
    include_str!("fixtures/vault.txt"),
    include_str!("fixtures/cavern.txt"),
];

const MAX_GROUND_EDITS: f64 = 160.0;
const MAX_GOLD_ADDED: f64 = 50.0;
const MAX_ENEMIES_ADDED: f64 = 24.0;
const MAX_LADDERS_ADDED: f64 = 16.0;
const MAX_ROPES_ADDED: f64 = 16.0;

#[derive(Clone, Debug)]
pub struct StubGenerator {
    fixtures: Vec<Level>,
}

impl Default for StubGenerator {
    fn default() -> Self {
        let fixtures = FIXTURE_TEXT.iter().map(|t| parse_vglc(t).expect("bundled fixtures are valid")).collect();
        StubGenerator { fixtures }
    }
}

impl StubGenerator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fixtures(&self) -> &[Level] {
        &self.fixtures
    }

    pub fn fixture(&self, name: &str) -> Option<&Level> {
        FIXTURE_NAMES.iter().position(|n| *n == name).map(|i| &self.fixtures[i])
    }

    /// Hash of the latent's bit patterns; selects the fixture and seeds edits.
    pub fn latent_hash(latent: &LatentVector<f64>) -> u64 {
        let mut state = 0u64;
        for v in latent.values() {
            state ^= v.to_bits();
            state = splitmix64(&mut state);
        }
        state
    }

    pub fn fixture_index(latent: &LatentVector<f64>) -> usize {
        (Self::latent_hash(latent) % FIXTURE_NAMES.len() as u64) as usize
    }
}

struct Edits {
    state: u64,
}

impl Edits {
    fn pick(&mut self, candidates: &mut Vec<usize>) -> Option<usize> {
        if candidates.is_empty() {
            return None;
        }
        let i = (splitmix64(&mut self.state) % candidates.len() as u64) as usize;
        Some(candidates.swap_remove(i))
    }

    /// Rewrites up to `n` cells matching `from` with the tile chosen by `to`.
    fn replace(&mut self, level: &mut Level, n: usize, from: impl Fn(TileType) -> bool, to: impl Fn(u64) -> TileType) {
        let mut candidates: Vec<usize> = (0..CELLS).filter(|&i| from(level.tiles()[i])).collect();
        for _ in 0..n {
            let Some(cell) = self.pick(&mut candidates) else { break };
            let tile = to(splitmix64(&mut self.state));
            level.set(cell / COLS, cell % COLS, tile);
        }
    }
}

fn amount(component: f64, scale: f64) -> usize {
    (component.abs() * scale).round() as usize
}

impl LevelGenerator for StubGenerator {
    fn generate(&self, latent: &LatentVector<f64>) -> Result<Level, GeneratorError> {
        let hash = Self::latent_hash(latent);
        let mut level = self.fixtures[(hash % self.fixtures.len() as u64) as usize].clone();
        let z = latent.values();
        let mut edits = Edits { state: hash };

        if z[3] > 0.0 {
            let ground = |d: u64| if d % 2 == 0 { TileType::SolidGround } else { TileType::DiggableGround };
            edits.replace(&mut level, amount(z[3], MAX_GROUND_EDITS), |t| t == TileType::Empty, ground);
        } else if z[3] < 0.0 {
            edits.replace(&mut level, amount(z[3], MAX_GROUND_EDITS), TileType::is_ground, |_| TileType::Empty);
        }

        if z[2] > 0.0 {
            edits.replace(&mut level, amount(z[2], MAX_GOLD_ADDED), |t| t != TileType::Gold, |_| TileType::Gold);
        } else if z[2] < 0.0 {
            let n = amount(z[2], level.count(TileType::Gold) as f64);
            edits.replace(&mut level, n, |t| t == TileType::Gold, |_| TileType::Empty);
        }

        if z[1] > 0.0 {
            edits.replace(&mut level, amount(z[1], MAX_ENEMIES_ADDED), |t| t == TileType::Empty, |_| TileType::Enemy);
        } else if z[1] < 0.0 {
            let n = amount(z[1], level.count(TileType::Enemy) as f64);
            edits.replace(&mut level, n, |t| t == TileType::Enemy, |_| TileType::Empty);
        }

        if z[4] > 0.0 {
            edits.replace(&mut level, amount(z[4], MAX_LADDERS_ADDED), |t| t == TileType::Empty, |_| TileType::Ladder);
        }
        if z[5] > 0.0 {
            edits.replace(&mut level, amount(z[5], MAX_ROPES_ADDED), |t| t == TileType::Empty, |_| TileType::Rope);
        }
        Ok(level)
    }
}
