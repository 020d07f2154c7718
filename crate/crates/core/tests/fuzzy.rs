//! Screening and selection invariants, plus small recovery experiments.

mod common;

use std::collections::HashSet;

use fuzzyforest::data::{generate_survey, generate_synthetic, one_hot_encode, SurveyConfig, SynthConfig};
use fuzzyforest::forest::TreeParams;
use fuzzyforest::fuzzy::{
    next_survivor_count, rfe_rf, run_pipeline, run_with_modules, screen_modules, select_features, ModuleSummary,
};
use fuzzyforest::rng::stream;
use fuzzyforest::wgcna::{find_modules, Dendrogram, ModulePartition, WgcnaConfig, GREY};
use fuzzyforest::{Error, FeatureMatrix, FuzzyConfig, RfeTrace};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn fast(final_k: usize, seed: u64) -> FuzzyConfig {
    FuzzyConfig {
        final_k,
        screen_trees: 30,
        select_trees: 50,
        seed,
        ..FuzzyConfig::default()
    }
}

/// `p` noise columns; column `signal` (if any) shifts with the label.
fn signal_data(seed: u64, n: usize, p: usize, signal: &[usize]) -> FeatureMatrix {
    let mut rng = stream(seed, &[]);
    let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let shift = if signal.contains(&j) { 1.5 } else { 0.0 };
            y.iter()
                .map(|&l| shift * f64::from(l) + rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    FeatureMatrix::from_columns(cols).unwrap().with_labels(y).unwrap()
}

/// Module summary for a hand-made partition.
fn summary(assignment: Vec<usize>) -> ModuleSummary {
    ModuleSummary {
        beta: 6.0,
        beta_selection: None,
        cut_height: 0.0,
        dendrogram: Dendrogram {
            n_leaves: assignment.len(),
            merges: vec![],
        },
        partition: ModulePartition::from_assignment(assignment, 1),
    }
}

fn check_trace(trace: &RfeTrace, start: &[usize], stop: usize, drop: f64) -> Result<(), TestCaseError> {
    let mut current: Vec<usize> = start.to_vec();
    current.sort_unstable();
    for (i, round) in trace.rounds.iter().enumerate() {
        prop_assert_eq!(&round.features, &current);
        let last = i + 1 == trace.rounds.len();
        let expect = if last {
            current.len()
        } else {
            next_survivor_count(current.len(), stop, drop)
        };
        prop_assert_eq!(round.kept.len(), expect);
        // Kept features are the highest ranked; the dropped ones the lowest.
        let top: HashSet<usize> = round.vim.top(expect).into_iter().collect();
        prop_assert_eq!(round.kept.iter().copied().collect::<HashSet<_>>(), top);
        current = round.kept.clone();
    }
    prop_assert_eq!(current.len(), stop.min(start.len()));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn elimination_rounds_are_nested_and_drop_the_least_important(
        seed in any::<u64>(),
        p in 1usize..24,
        stop_frac in 0.05f64..1.0,
        drop in 0.1f64..0.6,
    ) {
        let data = signal_data(seed, 60, p, &[0]);
        let stop = ((stop_frac * p as f64).ceil() as usize).max(1);
        let features: Vec<usize> = (0..p).rev().collect();
        let trace = rfe_rf(&data, &features, drop, stop, 8, &TreeParams::default(), seed).unwrap();
        check_trace(&trace, &features, stop, drop)?;
    }

    #[test]
    fn selection_comes_from_non_grey_survivors(seed in any::<u64>()) {
        let mut rng = stream(seed, &[1]);
        let assignment: Vec<usize> = (0..24).map(|_| rng.random_range(0..4)).collect();
        let data = signal_data(seed, 80, 24, &[1, 2]);
        let config = FuzzyConfig { final_k: 3, ..fast(3, seed) };
        let modules = summary(assignment.clone());
        let screening = screen_modules(&modules.partition, &data, &config).unwrap();
        prop_assert!(screening.survivors.iter().all(|&f| assignment[f] != GREY));
        for m in &screening.modules {
            prop_assert!(m.module != GREY);
            let members = modules.partition.members(m.module);
            check_trace(&m.trace, &members, config.module_target(members.len()), config.drop_fraction)?;
        }
        match run_with_modules(&data, modules, &config) {
            Ok(result) => {
                let survivors: HashSet<usize> = result.screening.survivors.iter().copied().collect();
                let selected = result.selected_columns();
                prop_assert!(selected.iter().all(|f| survivors.contains(f)));
                prop_assert_eq!(selected.len(), config.final_k.min(survivors.len()));
                prop_assert_eq!(&result.final_forest.features, &selected);
            }
            Err(Error::NoSurvivors) => prop_assert!(screening.survivors.is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

#[test]
fn sixteen_feature_module_screens_down_to_four() {
    let data = signal_data(1, 120, 16, &[3]);
    let config = fast(4, 1);
    let part = ModulePartition::from_assignment(vec![1; 16], 5);
    let screening = screen_modules(&part, &data, &config).unwrap();
    assert_eq!(screening.modules.len(), 1);
    assert_eq!(screening.modules[0].trace.sizes(), vec![16, 12, 9, 7, 6, 5, 4]);
    assert_eq!(screening.survivors.len(), 4);
}

#[test]
fn three_modules_of_twenty_leave_fifteen_survivors() {
    let data = common::checks::block_data(2);
    let found = find_modules(&data.matrix, &WgcnaConfig::default()).unwrap();
    assert_eq!(found.partition.n_modules(), 3);
    let screening = screen_modules(&found.partition, &data.matrix, &fast(10, 2)).unwrap();
    assert_eq!(screening.survivors.len(), 15);
    for m in &screening.modules {
        assert_eq!(m.trace.survivors().len(), 5);
    }
}

#[test]
fn all_grey_features_leave_nothing_to_select() {
    let data = signal_data(3, 300, 30, &[0]);
    let found = find_modules(&data, &WgcnaConfig::default()).unwrap();
    assert_eq!(found.partition.n_modules(), 0);
    let screening = screen_modules(&found.partition, &data, &fast(5, 3)).unwrap();
    assert!(screening.survivors.is_empty());
    assert!(matches!(select_features(&[], &data, &fast(5, 3)), Err(Error::NoSurvivors)));
    assert!(matches!(
        run_pipeline(&data, &WgcnaConfig::default(), &fast(5, 3)),
        Err(Error::NoSurvivors)
    ));
}

#[test]
fn screening_grey_too_gives_survivors() {
    let data = signal_data(3, 300, 30, &[0]);
    let config = FuzzyConfig {
        screen_grey: true,
        ..fast(5, 3)
    };
    let result = run_pipeline(&data, &WgcnaConfig::default(), &config).unwrap();
    assert_eq!(result.screening.survivors.len(), 8);
    assert_eq!(result.selected_columns()[0], 0);
}

#[test]
fn single_module_with_full_keep_ranks_everything() {
    let data = signal_data(4, 100, 7, &[2]);
    let config = FuzzyConfig {
        keep_fraction: 1.0,
        ..fast(7, 4)
    };
    let result = run_with_modules(&data, summary(vec![1; 7]), &config).unwrap();
    let mut ranked = result.selected_columns();
    assert_eq!(ranked.len(), 7);
    assert_eq!(ranked[0], 2);
    ranked.sort_unstable();
    assert_eq!(ranked, (0..7).collect::<Vec<_>>());
    let ranks: Vec<usize> = result.selection.ranked.iter().map(|r| r.rank).collect();
    assert_eq!(ranks, (1..=7).collect::<Vec<_>>());
    assert!(result.selection.ranked.windows(2).all(|w| w[0].vim >= w[1].vim));
}

#[test]
fn same_seed_serializes_identically() {
    let data = common::checks::block_data(5);
    let run = || serde_json::to_string(&run_pipeline(&data.matrix, &WgcnaConfig::default(), &fast(6, 5)).unwrap()).unwrap();
    assert_eq!(run(), run());
    let other = serde_json::to_string(&run_pipeline(&data.matrix, &WgcnaConfig::default(), &fast(6, 6)).unwrap()).unwrap();
    assert_ne!(run(), other);
}

#[test]
fn planted_signal_survives_module_screening() {
    let part = ModulePartition::from_assignment(vec![1; 8], 5);
    let hits = (0..100)
        .filter(|&seed| {
            let data = signal_data(1000 + seed, 200, 8, &[5]);
            let config = FuzzyConfig {
                screen_trees: 50,
                ..fast(2, seed)
            };
            screen_modules(&part, &data, &config).unwrap().survivors.contains(&5)
        })
        .count();
    assert!(hits >= 95, "signal survived in {hits}/100 runs");
}

#[test]
fn selection_draws_from_every_informative_module() {
    let balanced = (0..10)
        .filter(|&seed| {
            let data = generate_synthetic(&SynthConfig {
                n_samples: 600,
                block_sizes: vec![20, 20, 20],
                rho: 0.7,
                informative: vec![1, 1, 1],
                seed,
                ..SynthConfig::default()
            })
            .unwrap();
            let result = run_pipeline(&data.matrix, &WgcnaConfig::default(), &fast(6, seed)).unwrap();
            let blocks: HashSet<usize> = result.selected_columns().iter().map(|&c| data.block_of[c]).collect();
            blocks.len() == 3
        })
        .count();
    assert!(balanced >= 8, "all three modules represented in {balanced}/10 seeds");
}

#[test]
fn survey_sized_encoding_ranks_twenty() {
    // 124 categorical variables whose level counts sum to 443.
    let mut level_counts = vec![4; 71];
    level_counts.extend(vec![3; 53]);
    let survey = generate_survey(&SurveyConfig {
        n_rows: 300,
        level_counts,
        missing_fraction: 0.0,
        include_age: false,
        include_weight: false,
        ..SurveyConfig::default()
    })
    .unwrap();
    let table = &survey.table;
    let label = table.column_index("vote").unwrap();
    let names: Vec<&str> = table.names().iter().map(String::as_str).filter(|&n| n != "vote").collect();
    assert_eq!(names.len(), 124);
    let labels: Vec<u8> = table.column(label).iter().map(|c| u8::from(c.as_deref() == Some("B"))).collect();
    let matrix = one_hot_encode(&table.select(&names).unwrap()).unwrap().with_labels(labels).unwrap();
    assert_eq!(matrix.n_cols(), 443);
    let config = FuzzyConfig {
        screen_grey: true,
        screen_trees: 10,
        select_trees: 20,
        ..fast(20, 7)
    };
    let result = run_pipeline(&matrix, &WgcnaConfig::default(), &config).unwrap();
    assert_eq!(result.selection.ranked.len(), 20);
}
