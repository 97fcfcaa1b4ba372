use serde::{Deserialize, Serialize};

use crate::generator::LatentVector;
use crate::level::LevelStats;
use crate::solver::SolveResult;

use super::bins::{bin_for, BinIndex, CELL_COUNT};
use super::QdError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Genotype {
    pub latent: LatentVector<f64>,
    pub id: u64,
    #[serde(default)]
    pub parent_ids: Vec<u64>,
}

/// Solve outcome without the move list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub beatable: bool,
    pub path_cost: i64,
    pub action_count: i64,
    pub connectivity: f64,
    pub expanded_states: usize,
    pub budget_exhausted: bool,
}

impl From<&SolveResult> for SolveSummary {
    fn from(r: &SolveResult) -> Self {
        SolveSummary {
            beatable: r.beatable,
            path_cost: r.path_cost,
            action_count: r.action_count(),
            connectivity: r.connectivity,
            expanded_states: r.expanded_states,
            budget_exhausted: r.budget_exhausted,
        }
    }
}

/// One evaluated genotype; serialised as one archive JSON line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub bin: BinIndex,
    pub genotype: Genotype,
    pub fitness: f64,
    #[serde(flatten)]
    pub solve: SolveSummary,
    pub stats: LevelStats,
    pub eval_index: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMetrics {
    pub occupied: usize,
    pub beatable: usize,
    /// Beatable over occupied, 0 for an empty archive.
    pub percent_beatable: f64,
}

impl ArchiveMetrics {
    pub fn new(occupied: usize, beatable: usize) -> Self {
        let percent_beatable = if occupied == 0 { 0.0 } else { beatable as f64 / occupied as f64 };
        ArchiveMetrics { occupied, beatable, percent_beatable }
    }
}

/// What happened to a record offered to the archive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Placement {
    Filled,
    Replaced { previous: f64 },
    Rejected { incumbent: f64 },
}

/// 10 x 10 x 10 grid of elites. A cell's occupant is only replaced by a
/// strictly fitter record.
#[derive(Clone, Debug, PartialEq)]
pub struct Archive {
    cells: Vec<Option<EvalRecord>>,
    occupied: usize,
    beatable: usize,
}

impl Default for Archive {
    fn default() -> Self {
        Archive { cells: vec![None; CELL_COUNT], occupied: 0, beatable: 0 }
    }
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, bin: BinIndex) -> Option<&EvalRecord> {
        self.cells[bin.cell()].as_ref()
    }

    pub fn insert(&mut self, record: EvalRecord) -> Placement {
        let slot = &mut self.cells[record.bin.cell()];
        let placement = match slot {
            None => Placement::Filled,
            Some(old) if record.fitness > old.fitness => Placement::Replaced { previous: old.fitness },
            Some(old) => return Placement::Rejected { incumbent: old.fitness },
        };
        match slot.as_ref() {
            None => self.occupied += 1,
            Some(old) if old.solve.beatable => self.beatable -= 1,
            Some(_) => {}
        }
        if record.solve.beatable {
            self.beatable += 1;
        }
        *slot = Some(record);
        placement
    }

    /// Occupied cells in flat-index order.
    pub fn records(&self) -> impl Iterator<Item = &EvalRecord> {
        self.cells.iter().flatten()
    }

    /// Flat indices of occupied cells, ascending.
    pub fn occupied_cells(&self) -> Vec<usize> {
        self.cells.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(i, _)| i).collect()
    }

    pub fn cell(&self, cell: usize) -> Option<&EvalRecord> {
        self.cells[cell].as_ref()
    }

    pub fn metrics(&self) -> ArchiveMetrics {
        ArchiveMetrics::new(self.occupied, self.beatable)
    }

    /// Metrics from a full grid scan, ignoring the maintained counters.
    pub fn scan_metrics(&self) -> ArchiveMetrics {
        let occupied = self.records().count();
        let beatable = self.records().filter(|r| r.solve.beatable).count();
        ArchiveMetrics::new(occupied, beatable)
    }

    /// One JSON object per occupied cell, in cell order, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in self.records() {
            out.push_str(&serde_json::to_string(record).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Parses archive lines; every record must sit in the bin its stats imply
    /// and no bin may appear twice.
    pub fn from_jsonl(text: &str) -> Result<Self, QdError> {
        let mut archive = Archive::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let line_no = i + 1;
            let mismatch = |reason: String| QdError::ArchiveSchemaMismatch { line: line_no, reason };
            let record: EvalRecord = serde_json::from_str(line).map_err(|e| mismatch(e.to_string()))?;
            if bin_for(&record.stats) != record.bin {
                return Err(mismatch(format!("bin {:?} disagrees with stats", record.bin)));
            }
            if record.genotype.latent.values().iter().any(|v| !(-1.0..=1.0).contains(v)) {
                return Err(mismatch("latent outside [-1, 1]".into()));
            }
            if archive.get(record.bin).is_some() {
                return Err(mismatch(format!("duplicate bin {:?}", record.bin)));
            }
            archive.insert(record);
        }
        Ok(archive)
    }
}
