use std::fmt;

use serde::{Deserialize, Serialize};

/// The seven Lode Runner tile types with their VGLC character and integer code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum TileType {
    Empty = 0,
    Gold = 1,
    Enemy = 2,
    DiggableGround = 3,
    Ladder = 4,
    Rope = 5,
    SolidGround = 6,
}

impl TileType {
    pub const COUNT: usize = 7;

    pub const ALL: [TileType; Self::COUNT] = [
        TileType::Empty,
        TileType::Gold,
        TileType::Enemy,
        TileType::DiggableGround,
        TileType::Ladder,
        TileType::Rope,
        TileType::SolidGround,
    ];

    pub const fn code(self) -> u8 {
        self as u8
    }

    pub const fn vglc_char(self) -> char {
        match self {
            TileType::Empty => '.',
            TileType::Gold => 'G',
            TileType::Enemy => 'E',
            TileType::DiggableGround => 'b',
            TileType::Ladder => '#',
            TileType::Rope => '-',
            TileType::SolidGround => 'B',
        }
    }

    pub fn from_code(code: i64) -> Option<TileType> {
        usize::try_from(code).ok().and_then(|c| Self::ALL.get(c).copied())
    }

    pub fn from_vglc(ch: char) -> Option<TileType> {
        Self::ALL.into_iter().find(|t| t.vglc_char() == ch)
    }

    /// Diggable or solid ground; blocks movement.
    pub const fn is_ground(self) -> bool {
        matches!(self, TileType::DiggableGround | TileType::SolidGround)
    }
}

impl fmt::Display for TileType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vglc_char())
    }
}
