use crate::level::{Level, TileType, COLS, ROWS};

use super::{Action, Position};

pub const DIG_COST: u32 = 4;

/// One legal transition of the movement model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub to: Position,
    pub action: Action,
    pub cost: u32,
}

/// Bit set over treasure indices; treasures are numbered in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreasureSet {
    words: Box<[u64]>,
    len: usize,
}

impl TreasureSet {
    pub fn full(len: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(64)].into_boxed_slice();
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        TreasureSet { words, len }
    }

    pub fn empty(len: usize) -> Self {
        TreasureSet { words: vec![0; len.div_ceil(64)].into_boxed_slice(), len }
    }

    /// Width of the set, i.e. the level's treasure count.
    pub fn capacity(&self) -> usize {
        self.len
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.len && self.words[index / 64] & (1 << (index % 64)) != 0
    }

    pub fn remove(&mut self, index: usize) -> bool {
        let had = self.contains(index);
        if had {
            self.words[index / 64] &= !(1 << (index % 64));
        }
        had
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

/// Position plus the treasures still to collect.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub pos: Position,
    pub remaining: TreasureSet,
}

impl SearchState {
    /// Start state: every treasure remaining, minus any under the start cell.
    pub fn initial(level: &Level, pos: Position) -> Self {
        let treasures: Vec<(usize, usize)> = level.positions_of(TileType::Gold).collect();
        let mut remaining = TreasureSet::full(treasures.len());
        if let Some(i) = treasures.iter().position(|&(r, c)| r == pos.row && c == pos.col) {
            remaining.remove(i);
        }
        SearchState { pos, remaining }
    }
}

#[inline]
fn tile_at(level: &Level, row: usize, col: usize) -> Option<TileType> {
    (row < ROWS && col < COLS).then(|| level.get(row, col))
}

/// Whether the player at `pos` stands on something or holds on to something.
pub fn is_supported(level: &Level, pos: Position) -> bool {
    if pos.row + 1 >= ROWS {
        return true;
    }
    let here = level.get(pos.row, pos.col);
    let below = level.get(pos.row + 1, pos.col);
    matches!(here, TileType::Ladder | TileType::Rope)
        || matches!(below, TileType::SolidGround | TileType::DiggableGround | TileType::Ladder)
}

/// Every position transition available from `pos`.
///
/// An unsupported player can only fall. A supported player may step left or
/// right into any non-ground cell, climb up a ladder, go down onto or along a
/// ladder or let go of a rope, and dig down through diggable ground when the
/// cell beside the dig target is ground.
pub fn moves_from(level: &Level, pos: Position) -> Vec<Move> {
    let Position { row, col } = pos;
    let mut moves = Vec::with_capacity(4);
    let open = |r: usize, c: usize| tile_at(level, r, c).is_some_and(|t| !t.is_ground());
    let push = |moves: &mut Vec<Move>, r: usize, c: usize, action: Action| {
        moves.push(Move { to: Position { row: r, col: c }, action, cost: action.cost() });
    };

    if !is_supported(level, pos) {
        push(&mut moves, row + 1, col, Action::Fall);
        return moves;
    }

    let here = level.get(row, col);
    if col > 0 && open(row, col - 1) {
        push(&mut moves, row, col - 1, Action::Left);
    }
    if open(row, col + 1) {
        push(&mut moves, row, col + 1, Action::Right);
    }
    if here == TileType::Ladder && row > 0 && open(row - 1, col) {
        push(&mut moves, row - 1, col, Action::Up);
    }
    if let Some(below) = tile_at(level, row + 1, col) {
        let climbing = matches!(here, TileType::Ladder | TileType::Rope) || below == TileType::Ladder;
        if climbing && !below.is_ground() {
            push(&mut moves, row + 1, col, Action::Down);
        }
        if below == TileType::DiggableGround {
            let beside_ground =
                |c: Option<usize>| c.and_then(|c| tile_at(level, row + 1, c)).is_some_and(TileType::is_ground);
            if beside_ground(col.checked_sub(1)) || beside_ground(Some(col + 1)) {
                push(&mut moves, row + 1, col, Action::Dig);
            }
        }
    }
    moves
}

/// Successor search states with their step costs. Entering a cell that holds
/// a remaining treasure collects it.
pub fn successors(level: &Level, state: &SearchState) -> Vec<(SearchState, u32)> {
    let treasures: Vec<(usize, usize)> = level.positions_of(TileType::Gold).collect();
    moves_from(level, state.pos)
        .into_iter()
        .map(|m| {
            let mut remaining = state.remaining.clone();
            if let Some(i) = treasures.iter().position(|&(r, c)| r == m.to.row && c == m.to.col) {
                remaining.remove(i);
            }
            (SearchState { pos: m.to, remaining }, m.cost)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level_from(rows: &[&str], fill: TileType) -> Level {
        let mut level = Level::filled(fill);
        for (r, line) in rows.iter().enumerate() {
            for (c, ch) in line.chars().enumerate() {
                level.set(r, c, TileType::from_vglc(ch).unwrap());
            }
        }
        level
    }

    fn move_set(level: &Level, row: usize, col: usize) -> Vec<(Position, Action, u32)> {
        let mut moves: Vec<_> =
            moves_from(level, Position::new(row, col)).into_iter().map(|m| (m.to, m.action, m.cost)).collect();
        moves.sort_by_key(|m| (m.0, m.2));
        moves
    }

    #[test]
    fn floor_walk_both_ways() {
        // 3x3 corner fixture: empty row over solid floor.
        let level = level_from(&["BBBB", "B...B", "BBBBB"], TileType::SolidGround);
        let moves = move_set(&level, 1, 2);
        assert_eq!(moves, vec![(Position::new(1, 1), Action::Left, 1), (Position::new(1, 3), Action::Right, 1),]);
    }

    #[test]
    fn diggable_floor_adds_dig() {
        let level = level_from(&["BBBBB", "B...B", "Bbbb"], TileType::SolidGround);
        let moves = move_set(&level, 1, 2);
        assert_eq!(
            moves,
            vec![
                (Position::new(1, 1), Action::Left, 1),
                (Position::new(1, 3), Action::Right, 1),
                (Position::new(2, 2), Action::Dig, DIG_COST),
            ]
        );
    }

    #[test]
    fn mid_air_only_falls() {
        let level = level_from(&["...", "...", "..."], TileType::Empty);
        assert_eq!(move_set(&level, 0, 1), vec![(Position::new(1, 1), Action::Fall, 1)]);
    }

    #[test]
    fn dig_needs_ground_beside_target() {
        // Dig target (2,1) has solid ground at (2,0).
        let level = level_from(&["...", "...", "Bb."], TileType::Empty);
        let moves = move_set(&level, 1, 1);
        assert!(moves.contains(&(Position::new(2, 1), Action::Dig, 4)));
        // Without ground beside the target there is nothing to stand on.
        let level = level_from(&["...", "...", ".b.", "..."], TileType::Empty);
        let moves = move_set(&level, 1, 1);
        assert!(moves.iter().all(|m| m.1 != Action::Dig));
    }

    #[test]
    fn rope_catches_and_releases() {
        let level = level_from(&["...", "---", "...", "..."], TileType::Empty);
        // Hanging on rope: supported, may move along it or drop.
        let moves = move_set(&level, 1, 1);
        assert_eq!(
            moves,
            vec![
                (Position::new(1, 0), Action::Left, 1),
                (Position::new(1, 2), Action::Right, 1),
                (Position::new(2, 1), Action::Down, 1),
            ]
        );
        // Falling onto the rope ends the fall.
        assert_eq!(move_set(&level, 0, 1), vec![(Position::new(1, 1), Action::Fall, 1)]);
        assert!(is_supported(&level, Position::new(1, 1)));
    }

    #[test]
    fn ladder_climbing() {
        let level = level_from(&["...", ".#.", ".#.", "BBB"], TileType::SolidGround);
        let on_ladder = move_set(&level, 2, 1);
        assert!(on_ladder.contains(&(Position::new(1, 1), Action::Up, 1)));
        // Top of ladder climbs out into open air above.
        let top = move_set(&level, 1, 1);
        assert!(top.contains(&(Position::new(0, 1), Action::Up, 1)));
        // Standing on the ladder top can climb back down.
        let above = move_set(&level, 0, 1);
        assert!(above.contains(&(Position::new(1, 1), Action::Down, 1)));
        assert!(is_supported(&level, Position::new(0, 1)));
    }

    #[test]
    fn bottom_row_is_supported() {
        let level = Level::filled(TileType::Empty);
        let moves = move_set(&level, ROWS - 1, 0);
        assert_eq!(moves, vec![(Position::new(ROWS - 1, 1), Action::Right, 1)]);
    }

    #[test]
    fn treasure_set_ops() {
        let mut set = TreasureSet::full(70);
        assert_eq!(set.count(), 70);
        assert!(set.remove(65));
        assert!(!set.remove(65));
        assert!(!set.contains(70));
        assert_eq!(set.iter().count(), 69);
        assert!(TreasureSet::full(0).is_empty());
        assert!(TreasureSet::empty(5).is_empty());
    }

    #[test]
    fn entering_gold_collects_it() {
        let level = level_from(&["BBBB", "B.GB", "BBBB"], TileType::SolidGround);
        let start = SearchState::initial(&level, Position::new(1, 1));
        assert_eq!(start.remaining.count(), 1);
        let next = successors(&level, &start);
        assert_eq!(next.len(), 1);
        assert!(next[0].0.remaining.is_empty());
    }
}
