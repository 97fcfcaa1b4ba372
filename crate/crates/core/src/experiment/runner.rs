use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::generator::{LevelGenerator, StubGenerator, WeightsGenerator};
use crate::qd::{run_map_elites, Archive, ArchiveMetrics, RunOutput, BINS_PER_AXIS};

use super::aggregate::{aggregate_csv, aggregate_runs, metrics_csv};
use super::report::Heatmap;
use super::{io_err, ExperimentConfig, ExperimentError, GeneratorSource};

/// Files and final metrics of one MAP-Elites run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunArtifacts {
    pub label: String,
    pub run: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub archive: PathBuf,
    pub metrics: PathBuf,
    pub final_metrics: ArchiveMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub output_dir: PathBuf,
    pub runs: Vec<RunArtifacts>,
    pub aggregates: Vec<PathBuf>,
    pub reports: Vec<PathBuf>,
}

fn build_generator(source: &GeneratorSource, workspace: &Path) -> Result<Box<dyn LevelGenerator>, ExperimentError> {
    Ok(match source {
        GeneratorSource::Stub { .. } => Box::new(StubGenerator::new()),
        GeneratorSource::Weights { manifest, blob, .. } => {
            Box::new(WeightsGenerator::<f32>::load(workspace.join(manifest), workspace.join(blob))?)
        }
    })
}

fn write(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

/// Evolves every configured generator `runs` times in parallel and writes
/// the layout
///
/// ```text
/// <output_dir>/<label>/run_NN/archive.jsonl
/// <output_dir>/<label>/run_NN/metrics.csv
/// <output_dir>/<label>/aggregate.csv
/// <output_dir>/<label>/heatmaps/...
/// ```
///
/// with relative paths resolved against `workspace`.
pub fn run_experiment(config: &ExperimentConfig, workspace: &Path) -> Result<ExperimentSummary, ExperimentError> {
    config.validate()?;
    let output_dir = workspace.join(&config.output_dir);
    let mut summary =
        ExperimentSummary { output_dir: output_dir.clone(), runs: vec![], aggregates: vec![], reports: vec![] };
    for source in &config.generators {
        let generator = build_generator(source, workspace)?;
        let label_dir = output_dir.join(source.label());
        let outputs: Vec<(u64, RunOutput)> = (0..config.runs)
            .into_par_iter()
            .map(|r| {
                let mut engine = config.engine.clone();
                engine.seed = config.seed.wrapping_add(r as u64);
                run_map_elites(&engine, generator.as_ref()).map(|out| (engine.seed, out))
            })
            .collect::<Result<_, _>>()?;

        for (r, (seed, out)) in outputs.iter().enumerate() {
            let run_dir = label_dir.join(format!("run_{r:02}"));
            let archive = run_dir.join("archive.jsonl");
            let metrics = run_dir.join("metrics.csv");
            write(&archive, &out.archive.to_jsonl())?;
            write(&metrics, &metrics_csv(&out.snapshots))?;
            summary.runs.push(RunArtifacts {
                label: source.label().to_string(),
                run: r,
                seed: *seed,
                evaluations: out.evaluations,
                archive,
                metrics,
                final_metrics: out.archive.metrics(),
            });
        }

        let series: Vec<_> = outputs.iter().map(|(_, o)| o.snapshots.clone()).collect();
        let aggregate = label_dir.join("aggregate.csv");
        write(&aggregate, &aggregate_csv(&aggregate_runs(&series)?))?;
        summary.aggregates.push(aggregate);

        let archives: Vec<Archive> = outputs.into_iter().map(|(_, o)| o.archive).collect();
        summary.reports.extend(write_report(&archives, &label_dir.join("heatmaps"))?);
    }
    Ok(summary)
}

pub fn read_archive(path: &Path) -> Result<Archive, ExperimentError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(Archive::from_jsonl(&text)?)
}

/// Writes `heatmap.csv` (long format) plus `heatmap_ground{g}.csv` and
/// `heatmap_ground{g}.pgm` for each ground bin; returns the written paths.
pub fn write_report(archives: &[Archive], out_dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    let map = Heatmap::from_archives(archives)?;
    let mut written = Vec::with_capacity(1 + 2 * BINS_PER_AXIS);
    let long = out_dir.join("heatmap.csv");
    write(&long, &map.long_csv())?;
    written.push(long);
    for g in 0..BINS_PER_AXIS {
        let csv = out_dir.join(format!("heatmap_ground{g}.csv"));
        write(&csv, &map.ground_grid_csv(g))?;
        let pgm = out_dir.join(format!("heatmap_ground{g}.pgm"));
        write(&pgm, &map.ground_pgm(g))?;
        written.extend([csv, pgm]);
    }
    Ok(written)
}
