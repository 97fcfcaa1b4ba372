//! Steady-state MAP-Elites loop.
//!
//! Random-draw order, all from one ChaCha8 stream seeded with `seed`:
//!
//! 1. initial population: ten uniform genes per genotype, genotype by genotype;
//! 2. per offspring: the crossover coin; then either two parent cells, the cut
//!    point and the child pick, or one parent cell; then, gene by gene, the
//!    mutation coin and (when it lands) the polynomial draw.
//!
//! Offspring are bred in batches of `batch_size` from the archive as it stood
//! at the start of the batch, evaluated (in parallel when the batch has more
//! than one member), and placed strictly in evaluation order, so results do not
//! depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generator::{LatentVector, LevelGenerator, LATENT_SIZE};
use crate::solver::{solve_level, SolveResult, DEFAULT_BUDGET};

use super::archive::{Archive, ArchiveMetrics, EvalRecord, Genotype, Placement, SolveSummary};
use super::bins::bin_for;
use super::operators::{polynomial_mutation, single_point_crossover, DEFAULT_ETA};
use super::QdError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub total_evals: usize,
    pub init_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub eta: f64,
    pub budget: usize,
    pub log_every: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            total_evals: 50_000,
            init_size: 100,
            crossover_rate: 0.5,
            mutation_rate: 0.3,
            eta: DEFAULT_ETA,
            budget: DEFAULT_BUDGET,
            log_every: 1_000,
            batch_size: 1,
            seed: 0,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), QdError> {
        let fail = |msg: &str| Err(QdError::InvalidConfig(msg.into()));
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if self.init_size == 0 {
            return fail("init_size must be at least 1");
        }
        if self.total_evals < self.init_size {
            return fail("total_evals must be at least init_size");
        }
        if !unit(self.crossover_rate) || !unit(self.mutation_rate) {
            return fail("rates must lie in [0, 1]");
        }
        if self.eta.is_nan() || self.eta < 0.0 {
            return fail("eta must be non-negative");
        }
        if self.log_every == 0 || self.batch_size == 0 || self.budget == 0 {
            return fail("log_every, batch_size and budget must be positive");
        }
        Ok(())
    }
}

/// Archive metrics after `evaluations` evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub evaluations: usize,
    #[serde(flatten)]
    pub metrics: ArchiveMetrics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub archive: Archive,
    pub snapshots: Vec<Snapshot>,
    pub evaluations: usize,
}

/// Fitness is the larger of path cost and connectivity, so any solution of
/// cost 1 or more outranks every unbeatable level.
pub fn fitness(result: &SolveResult) -> f64 {
    (result.path_cost as f64).max(result.connectivity)
}

/// Generates, solves and bins one genotype.
pub fn evaluate(
    genotype: Genotype,
    generator: &dyn LevelGenerator,
    eval_index: u64,
    budget: usize,
) -> Result<EvalRecord, QdError> {
    let level = generator.generate(&genotype.latent)?;
    let (_, result) = solve_level(&level, genotype.latent.first(), budget);
    let stats = level.stats();
    Ok(EvalRecord {
        bin: bin_for(&stats),
        fitness: fitness(&result),
        solve: SolveSummary::from(&result),
        stats,
        eval_index,
        genotype,
    })
}

fn random_latent(rng: &mut ChaCha8Rng) -> LatentVector<f64> {
    LatentVector::clamped(std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0))
}

fn breed(archive: &Archive, occupied: &[usize], config: &EngineConfig, rng: &mut ChaCha8Rng, id: u64) -> Genotype {
    let pick = |rng: &mut ChaCha8Rng| {
        let cell = occupied[rng.random_range(0..occupied.len())];
        &archive.cell(cell).expect("occupied cell").genotype
    };
    let (mut genes, parent_ids) = if rng.random::<f64>() < config.crossover_rate {
        let a = pick(rng);
        let b = pick(rng);
        let cut = rng.random_range(1..LATENT_SIZE);
        let (first, second) = single_point_crossover(a.latent.values(), b.latent.values(), cut);
        let child = if rng.random::<bool>() { first } else { second };
        (child, vec![a.id, b.id])
    } else {
        let a = pick(rng);
        (*a.latent.values(), vec![a.id])
    };
    polynomial_mutation(&mut genes, config.mutation_rate, config.eta, rng);
    Genotype { latent: LatentVector::clamped(genes), id, parent_ids }
}

/// Runs MAP-Elites and reports every placement to `observe`.
pub fn run_map_elites_with(
    config: &EngineConfig,
    generator: &dyn LevelGenerator,
    mut observe: impl FnMut(&EvalRecord, Placement),
) -> Result<RunOutput, QdError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut archive = Archive::new();
    let mut snapshots = Vec::with_capacity(config.total_evals.div_ceil(config.log_every));
    let mut done = 0usize;

    while done < config.total_evals {
        let batch: Vec<Genotype> = if done < config.init_size {
            (done..config.init_size)
                .map(|i| Genotype { latent: random_latent(&mut rng), id: i as u64, parent_ids: Vec::new() })
                .collect()
        } else {
            let occupied = archive.occupied_cells();
            let n = config.batch_size.min(config.total_evals - done);
            (0..n).map(|k| breed(&archive, &occupied, config, &mut rng, (done + k) as u64)).collect()
        };

        let records: Vec<EvalRecord> = if batch.len() > 1 {
            batch
                .into_par_iter()
                .map(|g| {
                    let idx = g.id;
                    evaluate(g, generator, idx, config.budget)
                })
                .collect::<Result<_, _>>()?
        } else {
            batch
                .into_iter()
                .map(|g| {
                    let idx = g.id;
                    evaluate(g, generator, idx, config.budget)
                })
                .collect::<Result<_, _>>()?
        };

        for record in records {
            let placement = archive.insert(record.clone());
            observe(&record, placement);
            done += 1;
            if done % config.log_every == 0 || done == config.total_evals {
                snapshots.push(Snapshot { evaluations: done, metrics: archive.metrics() });
            }
        }
    }

    Ok(RunOutput { archive, snapshots, evaluations: done })
}

pub fn run_map_elites(config: &EngineConfig, generator: &dyn LevelGenerator) -> Result<RunOutput, QdError> {
    run_map_elites_with(config, generator, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{FixedGenerator, StubGenerator};
    use crate::level::{parse_vglc, Level, TileType};

    fn result(path_cost: i64, connectivity: f64) -> SolveResult {
        SolveResult {
            beatable: path_cost >= 0,
            path_cost,
            actions: Vec::new(),
            expanded_states: 0,
            connectivity,
            budget_exhausted: false,
        }
    }

    #[test]
    fn fitness_examples() {
        assert_eq!(fitness(&result(-1, 0.5)), 0.5);
        assert_eq!(fitness(&result(37, 0.9)), 37.0);
        assert_eq!(fitness(&result(0, 0.8)), 0.8);
    }

    /// Single empty cell at the left of a corridor of enemies, gold 12 cells on.
    pub(crate) fn corridor_twelve() -> Level {
        let mut text = String::new();
        for row in 0..22 {
            let line = if row == 20 { format!(".{}G{}", "E".repeat(11), "B".repeat(19)) } else { "B".repeat(32) };
            text.push_str(&line);
            text.push('\n');
        }
        parse_vglc(&text).unwrap()
    }

    #[test]
    fn evaluate_known_cost_fixture() {
        let generator = FixedGenerator(corridor_twelve());
        let genotype = Genotype { latent: LatentVector::zeros(), id: 3, parent_ids: vec![] };
        let record = evaluate(genotype.clone(), &generator, 7, DEFAULT_BUDGET).unwrap();
        assert_eq!(record.fitness, 12.0);
        assert!(record.solve.beatable);
        assert_eq!(record.bin, bin_for(&record.stats));
        let again = evaluate(genotype, &generator, 8, DEFAULT_BUDGET).unwrap();
        assert_eq!(EvalRecord { eval_index: 7, ..again }, record);
    }

    #[test]
    fn no_empty_tile_scores_zero() {
        let generator = FixedGenerator(Level::filled(TileType::Ladder));
        let genotype = Genotype { latent: LatentVector::zeros(), id: 0, parent_ids: vec![] };
        let record = evaluate(genotype, &generator, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(record.fitness, 0.0);
        assert!(!record.solve.beatable);
    }

    #[test]
    fn init_only_run() {
        let config = EngineConfig { total_evals: 100, init_size: 100, log_every: 30, ..Default::default() };
        let mut seen = Vec::new();
        let out =
            run_map_elites_with(&config, &StubGenerator::new(), |r, _| seen.push(r.genotype.parent_ids.len())).unwrap();
        assert_eq!(out.evaluations, 100);
        assert_eq!(seen.len(), 100);
        assert!(seen.iter().all(|p| *p == 0));
        let marks: Vec<usize> = out.snapshots.iter().map(|s| s.evaluations).collect();
        assert_eq!(marks, vec![30, 60, 90, 100]);
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            EngineConfig { init_size: 0, ..Default::default() },
            EngineConfig { total_evals: 50, init_size: 100, ..Default::default() },
            EngineConfig { crossover_rate: 1.5, ..Default::default() },
            EngineConfig { log_every: 0, ..Default::default() },
        ];
        for config in bad {
            assert!(matches!(run_map_elites(&config, &StubGenerator::new()), Err(QdError::InvalidConfig(_))));
        }
    }

    #[test]
    fn batched_runs_are_reproducible() {
        let config = EngineConfig {
            total_evals: 300,
            init_size: 50,
            batch_size: 16,
            log_every: 100,
            seed: 9,
            ..Default::default()
        };
        let a = run_map_elites(&config, &StubGenerator::new()).unwrap();
        let b = run_map_elites(&config, &StubGenerator::new()).unwrap();
        assert_eq!(a.archive.to_jsonl(), b.archive.to_jsonl());
        assert_eq!(a.snapshots, b.snapshots);
    }
}
