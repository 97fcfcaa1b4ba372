use proptest::prelude::*;

use lodeqd_core::generator::FixedGenerator;
use lodeqd_core::qd::{
    bin_for, evaluate, fitness, run_map_elites, run_map_elites_with, Archive, EngineConfig, Genotype, Placement,
    QdError,
};
use lodeqd_core::{LatentVector, Level, StubGenerator, TileType};

fn small(seed: u64) -> EngineConfig {
    EngineConfig { total_evals: 600, init_size: 50, log_every: 100, seed, ..EngineConfig::default() }
}

#[test]
fn archive_is_consistent_and_persists() {
    let out = run_map_elites(&small(3), &StubGenerator::new()).unwrap();
    assert_eq!(out.evaluations, 600);
    assert_eq!(out.snapshots.len(), 6);
    assert_eq!(out.archive.metrics(), out.archive.scan_metrics());
    for record in out.archive.records() {
        assert_eq!(record.bin, bin_for(&record.stats));
        assert!(record.eval_index < 600);
        assert_eq!(record.fitness, fitness_of(record));
    }
    let text = out.archive.to_jsonl();
    let back = Archive::from_jsonl(&text).unwrap();
    assert_eq!(back, out.archive);
    assert_eq!(back.to_jsonl(), text);
}

fn fitness_of(record: &lodeqd_core::qd::EvalRecord) -> f64 {
    (record.solve.path_cost as f64).max(record.solve.connectivity)
}

#[test]
fn seeds_matter_and_repeat() {
    let stub = StubGenerator::new();
    let a = run_map_elites(&small(1), &stub).unwrap();
    let b = run_map_elites(&small(1), &stub).unwrap();
    let c = run_map_elites(&small(2), &stub).unwrap();
    assert_eq!(a.archive, b.archive);
    assert_ne!(a.archive.to_jsonl(), c.archive.to_jsonl());
}

#[test]
fn batched_evaluation_is_reproducible() {
    let stub = StubGenerator::new();
    let config = EngineConfig { batch_size: 16, ..small(9) };
    let a = run_map_elites(&config, &stub).unwrap();
    let b = run_map_elites(&config, &stub).unwrap();
    assert_eq!(a.archive.to_jsonl(), b.archive.to_jsonl());
    assert_eq!(a.evaluations, 600);
}

#[test]
fn offspring_name_their_parents() {
    let mut seen = 0;
    run_map_elites_with(&small(4), &StubGenerator::new(), |record, _| {
        let g = &record.genotype;
        assert_eq!(g.id, record.eval_index);
        if g.id < 50 {
            assert!(g.parent_ids.is_empty());
        } else {
            assert!(matches!(g.parent_ids.len(), 1 | 2), "{:?}", g.parent_ids);
            assert!(g.parent_ids.iter().all(|&p| p < g.id));
        }
        seen += 1;
    })
    .unwrap();
    assert_eq!(seen, 600);
}

#[test]
fn levels_without_spawn_score_zero() {
    let generator = FixedGenerator(Level::filled(TileType::SolidGround));
    let genotype = Genotype { latent: LatentVector::zeros(), id: 0, parent_ids: vec![] };
    let record = evaluate(genotype, &generator, 0, 1000).unwrap();
    assert_eq!(record.fitness, 0.0);
    assert!(!record.solve.beatable);
    let out = run_map_elites(&EngineConfig { total_evals: 120, ..small(0) }, &generator).unwrap();
    assert_eq!(out.archive.metrics().occupied, 1);
}

#[test]
fn invalid_configs_are_rejected() {
    let stub = StubGenerator::new();
    for config in [
        EngineConfig { total_evals: 10, init_size: 50, ..small(0) },
        EngineConfig { log_every: 0, ..small(0) },
        EngineConfig { mutation_rate: 1.5, ..small(0) },
        EngineConfig { init_size: 0, ..small(0) },
    ] {
        assert!(matches!(run_map_elites(&config, &stub), Err(QdError::InvalidConfig(_))), "{config:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn elites_only_improve(seed in any::<u64>()) {
        let mut best = vec![f64::NEG_INFINITY; 1000];
        let mut ok = true;
        run_map_elites_with(&EngineConfig { total_evals: 300, init_size: 40, log_every: 50, seed, ..EngineConfig::default() },
            &StubGenerator::new(), |record, placement| {
                let cell = record.bin.cell();
                match placement {
                    Placement::Filled | Placement::Replaced { .. } => {
                        ok &= record.fitness > best[cell];
                        best[cell] = record.fitness;
                    }
                    Placement::Rejected { incumbent } => ok &= record.fitness <= incumbent,
                }
            }).unwrap();
        prop_assert!(ok);
    }

    #[test]
    fn fitness_is_cost_or_connectivity(cost in -1i64..500, conn in 0.0f64..=1.0) {
        let result = lodeqd_core::SolveResult {
            beatable: cost >= 0,
            path_cost: cost,
            actions: vec![],
            expanded_states: 0,
            connectivity: conn,
            budget_exhausted: false,
        };
        prop_assert_eq!(fitness(&result), (cost as f64).max(conn));
    }
}
