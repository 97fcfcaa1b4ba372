use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use crate::level::{Level, TileType, CELLS};

use super::{connectivity, moves_from, select_spawn, Action, Position, SearchState, SolveResult, TreasureSet};

/// Maximum number of expanded states per search.
pub const DEFAULT_BUDGET: usize = 100_000;

const NO_PARENT: u32 = u32::MAX;

struct Node {
    cell: u16,
    set: u32,
    g: u32,
    parent: u32,
    action: Action,
}

struct BestCost {
    g: u32,
    closed: bool,
}

/// Extremes of `row + col` and `row - col` over a treasure set; the farthest
/// Manhattan distance from any cell follows from these four numbers.
#[derive(Clone, Copy)]
struct Extent {
    sum: (i32, i32),
    diff: (i32, i32),
}

impl Extent {
    fn of(set: &TreasureSet, treasures: &[Position]) -> Option<Extent> {
        set.iter().map(|t| treasures[t]).fold(None, |acc, p| {
            let (s, d) = ((p.row + p.col) as i32, p.row as i32 - p.col as i32);
            Some(match acc {
                None => Extent { sum: (s, s), diff: (d, d) },
                Some(e) => Extent { sum: (e.sum.0.min(s), e.sum.1.max(s)), diff: (e.diff.0.min(d), e.diff.1.max(d)) },
            })
        })
    }

    fn farthest(extent: Option<Extent>, cell: usize) -> u32 {
        let Some(e) = extent else { return 0 };
        let p = Position::from_index(cell);
        let (s, d) = ((p.row + p.col) as i32, p.row as i32 - p.col as i32);
        (s - e.sum.0).max(e.sum.1 - s).max(d - e.diff.0).max(e.diff.1 - d) as u32
    }
}

/// Hash-consed treasure sets so that search keys stay two machine words.
struct SetTable<'a> {
    treasures: &'a [Position],
    sets: Vec<TreasureSet>,
    extents: Vec<Option<Extent>>,
    ids: HashMap<TreasureSet, u32>,
    removals: HashMap<(u32, u32), u32>,
}

impl<'a> SetTable<'a> {
    fn new(initial: TreasureSet, treasures: &'a [Position]) -> Self {
        let mut ids = HashMap::new();
        ids.insert(initial.clone(), 0);
        let extents = vec![Extent::of(&initial, treasures)];
        SetTable { treasures, sets: vec![initial], extents, ids, removals: HashMap::new() }
    }

    fn heuristic(&self, cell: usize, set: u32) -> u32 {
        Extent::farthest(self.extents[set as usize], cell)
    }

    fn without(&mut self, set: u32, treasure: u32) -> u32 {
        if !self.sets[set as usize].contains(treasure as usize) {
            return set;
        }
        if let Some(&id) = self.removals.get(&(set, treasure)) {
            return id;
        }
        let mut next = self.sets[set as usize].clone();
        next.remove(treasure as usize);
        let id = match self.ids.entry(next) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                let id = self.sets.len() as u32;
                self.extents.push(Extent::of(e.key(), self.treasures));
                self.sets.push(e.key().clone());
                e.insert(id);
                id
            }
        };
        self.removals.insert((set, treasure), id);
        id
    }
}

/// A* over (position, remaining treasure) states.
///
/// The heuristic is the Manhattan distance to the farthest remaining treasure,
/// which never overestimates because every action moves at most one cell for
/// a cost of at least one. At most `budget` states are expanded; running out
/// reports the level as unbeatable with `budget_exhausted` set.
pub fn astar_solve(level: &Level, spawn: Position, budget: usize) -> SolveResult {
    let treasures: Vec<Position> = level.positions_of(TileType::Gold).map(|(row, col)| Position { row, col }).collect();
    let mut gold_at = [u32::MAX; CELLS];
    for (i, t) in treasures.iter().enumerate() {
        gold_at[t.index()] = i as u32;
    }
    let graph: Vec<Vec<(u16, Action, u32)>> = (0..CELLS)
        .map(|i| {
            moves_from(level, Position::from_index(i))
                .into_iter()
                .map(|m| (m.to.index() as u16, m.action, m.cost))
                .collect()
        })
        .collect();

    let start = SearchState::initial(level, spawn);
    let mut table = SetTable::new(start.remaining, &treasures);
    let key = |cell: u16, set: u32| (u64::from(set) << 16) | u64::from(cell);

    let mut nodes = vec![Node { cell: spawn.index() as u16, set: 0, g: 0, parent: NO_PARENT, action: Action::Fall }];
    let mut best: HashMap<u64, BestCost> = HashMap::new();
    best.insert(key(nodes[0].cell, 0), BestCost { g: 0, closed: false });
    let mut open = BinaryHeap::new();
    let h0 = table.heuristic(spawn.index(), 0);
    open.push(Reverse((h0, h0, 0u32)));

    let mut expanded = 0usize;
    let mut exhausted = false;
    let mut goal = None;

    while let Some(Reverse((_, _, idx))) = open.pop() {
        let (cell, set, g) = {
            let n = &nodes[idx as usize];
            (n.cell, n.set, n.g)
        };
        let entry = best.get_mut(&key(cell, set)).expect("queued states are recorded");
        if entry.closed || entry.g < g {
            continue;
        }
        if table.sets[set as usize].is_empty() {
            goal = Some(idx);
            break;
        }
        if expanded >= budget {
            exhausted = true;
            break;
        }
        entry.closed = true;
        expanded += 1;

        for &(to, action, cost) in &graph[cell as usize] {
            let treasure = gold_at[to as usize];
            let next_set = if treasure == u32::MAX { set } else { table.without(set, treasure) };
            let next_g = g + cost;
            match best.entry(key(to, next_set)) {
                Entry::Occupied(mut e) => {
                    let known = e.get_mut();
                    if known.closed || known.g <= next_g {
                        continue;
                    }
                    known.g = next_g;
                }
                Entry::Vacant(e) => {
                    e.insert(BestCost { g: next_g, closed: false });
                }
            }
            let h = table.heuristic(to as usize, next_set);
            let child = nodes.len() as u32;
            nodes.push(Node { cell: to, set: next_set, g: next_g, parent: idx, action });
            open.push(Reverse((next_g + h, h, child)));
        }
    }

    let connectivity = connectivity(level, spawn);
    match goal {
        Some(idx) => {
            let mut actions = Vec::new();
            let mut cursor = idx;
            while nodes[cursor as usize].parent != NO_PARENT {
                actions.push(nodes[cursor as usize].action);
                cursor = nodes[cursor as usize].parent;
            }
            actions.reverse();
            SolveResult {
                beatable: true,
                path_cost: i64::from(nodes[idx as usize].g),
                actions,
                expanded_states: expanded,
                connectivity,
                budget_exhausted: false,
            }
        }
        None => SolveResult {
            beatable: false,
            path_cost: -1,
            actions: Vec::new(),
            expanded_states: expanded,
            connectivity,
            budget_exhausted: exhausted,
        },
    }
}

/// Spawn selection followed by a budgeted search; a level with no empty tile
/// is reported unbeatable with zero connectivity.
pub fn solve_level(level: &Level, first_latent: f64, budget: usize) -> (Option<Position>, SolveResult) {
    match select_spawn(level, first_latent) {
        Ok(spawn) => (Some(spawn), astar_solve(level, spawn, budget)),
        Err(_) => (None, SolveResult::no_spawn()),
    }
}
