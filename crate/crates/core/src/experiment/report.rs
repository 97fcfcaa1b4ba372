use crate::qd::{Archive, BinIndex, BINS_PER_AXIS, CELL_COUNT};

use super::ExperimentError;

/// Pixel edge of one heatmap cell in the graymap output.
pub const PGM_CELL_PX: usize = 8;
/// Graymap value for a cell no archive occupies.
pub const PGM_EMPTY: u8 = 255;

/// Mean fitness of a cell over the archives that occupy it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellMean {
    pub mean: f64,
    pub archives: usize,
}

/// Per-cell mean elite fitness across a set of archives.
#[derive(Clone, Debug, PartialEq)]
pub struct Heatmap {
    cells: Vec<Option<CellMean>>,
    archives: usize,
}

impl Heatmap {
    pub fn from_archives(archives: &[Archive]) -> Result<Self, ExperimentError> {
        if archives.is_empty() {
            return Err(ExperimentError::InvalidConfig("report needs at least one archive".into()));
        }
        let cells = (0..CELL_COUNT)
            .map(|cell| {
                let values: Vec<f64> = archives.iter().filter_map(|a| a.cell(cell)).map(|r| r.fitness).collect();
                (!values.is_empty()).then(|| CellMean {
                    mean: values.iter().sum::<f64>() / values.len() as f64,
                    archives: values.len(),
                })
            })
            .collect();
        Ok(Heatmap { cells, archives: archives.len() })
    }

    pub fn archive_count(&self) -> usize {
        self.archives
    }

    pub fn get(&self, bin: BinIndex) -> Option<CellMean> {
        self.cells[bin.cell()]
    }

    pub fn occupied(&self) -> usize {
        self.cells.iter().flatten().count()
    }

    /// Largest cell mean, if any cell is occupied.
    pub fn max_mean(&self) -> Option<f64> {
        self.cells.iter().flatten().map(|c| c.mean).reduce(f64::max)
    }

    /// Long format, one line per cell ordered by ground, treasure, enemy;
    /// empty cells carry `NA`.
    pub fn long_csv(&self) -> String {
        let mut out = String::from("ground_bin,treasure_bin,enemy_bin,archives,mean_fitness\n");
        for g in 0..BINS_PER_AXIS {
            for t in 0..BINS_PER_AXIS {
                for e in 0..BINS_PER_AXIS {
                    let bin = BinIndex::new(e, t, g).expect("in range");
                    match self.get(bin) {
                        Some(c) => out.push_str(&format!("{g},{t},{e},{},{}\n", c.archives, c.mean)),
                        None => out.push_str(&format!("{g},{t},{e},0,NA\n")),
                    }
                }
            }
        }
        out
    }

    /// The 10 x 10 slice for one ground bin: treasure 9 in the first row,
    /// enemy increasing left to right.
    pub fn ground_grid_csv(&self, ground: usize) -> String {
        let mut out = String::from("treasure_bin");
        for e in 0..BINS_PER_AXIS {
            out.push_str(&format!(",enemy_{e}"));
        }
        out.push('\n');
        for t in (0..BINS_PER_AXIS).rev() {
            out.push_str(&t.to_string());
            for e in 0..BINS_PER_AXIS {
                match self.get(BinIndex::new(e, t, ground).expect("in range")) {
                    Some(c) => out.push_str(&format!(",{}", c.mean)),
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Plain (P2) graymap of one ground slice, same orientation as
    /// [`Heatmap::ground_grid_csv`], shaded with [`intensity`] against the
    /// map-wide maximum.
    pub fn ground_pgm(&self, ground: usize) -> String {
        let max = self.max_mean().unwrap_or(0.0);
        let side = BINS_PER_AXIS * PGM_CELL_PX;
        let mut out = format!("P2\n# ground bin {ground}, treasure up, enemy right\n{side} {side}\n255\n");
        for t in (0..BINS_PER_AXIS).rev() {
            let shades: Vec<String> = (0..BINS_PER_AXIS)
                .map(|e| {
                    let shade = match self.get(BinIndex::new(e, t, ground).expect("in range")) {
                        Some(c) => intensity(c.mean, max),
                        None => PGM_EMPTY,
                    };
                    vec![shade.to_string(); PGM_CELL_PX].join(" ")
                })
                .collect();
            let line = shades.join(" ");
            for _ in 0..PGM_CELL_PX {
                out.push_str(&line);
                out.push('\n');
            }
        }
        out
    }
}

/// Gray level for an occupied cell.
///
/// Fitness in `[0, 1)` (unbeatable, connectivity only) maps to the dark band
/// 20..=80. Fitness `f >= 1` maps to `100 + round(135 * ln f / ln max)`, so
/// the fittest cell is 235 and empty cells (255) stay distinguishable.
pub fn intensity(fitness: f64, max: f64) -> u8 {
    if fitness < 1.0 {
        return (20.0 + (60.0 * fitness.max(0.0)).round()) as u8;
    }
    if max <= 1.0 {
        return 100;
    }
    let scaled = (135.0 * fitness.ln() / max.ln()).round().clamp(0.0, 135.0);
    100 + scaled as u8
}
