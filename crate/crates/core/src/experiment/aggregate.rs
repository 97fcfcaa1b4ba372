use crate::qd::{ArchiveMetrics, Snapshot};

use super::ExperimentError;

pub const METRICS_HEADER: &str = "eval_index,occupied,beatable,percent_beatable";
pub const AGGREGATE_HEADER: &str = "eval_index,occupied_mean,occupied_ci95,beatable_mean,beatable_ci95,\
percent_beatable_mean,percent_beatable_ci95,runs";

/// Sample mean with the half-width of a normal-approximation 95% interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub ci95: f64,
}

/// `1.96 * sd / sqrt(n)` with the sample standard deviation; a single value
/// has half-width 0. Panics on an empty slice.
pub fn mean_ci95(values: &[f64]) -> MeanCi {
    assert!(!values.is_empty(), "mean of no values");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return MeanCi { mean, ci95: 0.0 };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    MeanCi { mean, ci95: 1.96 * var.sqrt() / n.sqrt() }
}

/// Cross-run statistics at one snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateRow {
    pub eval_index: usize,
    pub occupied: MeanCi,
    pub beatable: MeanCi,
    pub percent_beatable: MeanCi,
    pub runs: usize,
}

/// Combines per-run snapshot series; every run must share the same
/// snapshot schedule.
pub fn aggregate_runs(runs: &[Vec<Snapshot>]) -> Result<Vec<AggregateRow>, ExperimentError> {
    let first = runs.first().ok_or_else(|| ExperimentError::InvalidConfig("no runs to aggregate".into()))?;
    for (r, series) in runs.iter().enumerate() {
        let same = series.len() == first.len() && series.iter().zip(first).all(|(a, b)| a.evaluations == b.evaluations);
        if !same {
            return Err(ExperimentError::MalformedMetrics {
                path: format!("run {r}"),
                reason: "snapshot schedule differs from run 0".into(),
            });
        }
    }
    let rows = (0..first.len())
        .map(|i| {
            let column =
                |f: fn(&ArchiveMetrics) -> f64| -> Vec<f64> { runs.iter().map(|s| f(&s[i].metrics)).collect() };
            AggregateRow {
                eval_index: first[i].evaluations,
                occupied: mean_ci95(&column(|m| m.occupied as f64)),
                beatable: mean_ci95(&column(|m| m.beatable as f64)),
                percent_beatable: mean_ci95(&column(|m| m.percent_beatable)),
                runs: runs.len(),
            }
        })
        .collect();
    Ok(rows)
}

pub fn metrics_csv(snapshots: &[Snapshot]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for s in snapshots {
        let m = &s.metrics;
        out.push_str(&format!("{},{},{},{}\n", s.evaluations, m.occupied, m.beatable, m.percent_beatable));
    }
    out
}

/// Parses a per-run metrics CSV; `path` only labels errors.
pub fn parse_metrics_csv(text: &str, path: &str) -> Result<Vec<Snapshot>, ExperimentError> {
    let bad = |reason: String| ExperimentError::MalformedMetrics { path: path.to_string(), reason };
    let mut lines = text.lines();
    if lines.next() != Some(METRICS_HEADER) {
        return Err(bad("missing or wrong header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(bad(format!("line {}: expected 4 fields", i + 2)));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("line {}: {e}", i + 2)));
            let evaluations = int(fields[0])?;
            let metrics = ArchiveMetrics::new(int(fields[1])?, int(fields[2])?);
            let percent: f64 = fields[3].parse().map_err(|e| bad(format!("line {}: {e}", i + 2)))?;
            if percent != metrics.percent_beatable {
                return Err(bad(format!("line {}: percent_beatable disagrees with counts", i + 2)));
            }
            Ok(Snapshot { evaluations, metrics })
        })
        .collect()
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = format!("{AGGREGATE_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.eval_index,
            r.occupied.mean,
            r.occupied.ci95,
            r.beatable.mean,
            r.beatable.ci95,
            r.percent_beatable.mean,
            r.percent_beatable.ci95,
            r.runs
        ));
    }
    out
}
