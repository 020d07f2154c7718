//! Library-versus-oracle comparisons shared by the core test suites and
//! the acceptance run. Each returns the measured quantity; callers assert.
#![allow(dead_code)]

use std::collections::HashSet;

use fuzzyforest::data::{generate_survey, generate_synthetic, impute_pmm, ImputeConfig, RawTable, SurveyConfig, SynthConfig};
use fuzzyforest::eval::{logit_gradient, logit_objective, roc_curve, Design};
use fuzzyforest::forest::{fit_tree, Node, TreeParams};
use fuzzyforest::fuzzy::{next_survivor_count, run_pipeline, FuzzyConfig};
use fuzzyforest::rng::stream;
use fuzzyforest::wgcna::{adjusted_rand_index, find_modules, topological_overlap, AdjacencyMatrix, SquareMatrix, WgcnaConfig};
use fuzzyforest::FeatureMatrix;
use rand::Rng;

use super::*;

/// Largest |library - brute force| over random symmetric adjacency
/// matrices with p in 2..=16.
pub fn tom_max_error(cases: usize, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let mut rng = stream(seed, &[1, case as u64]);
        let p = rng.random_range(2..=16);
        let mut a = vec![vec![0.0; p]; p];
        for i in 0..p {
            a[i][i] = 1.0;
            for j in i + 1..p {
                // Mix exact zeros and ones in with interior values.
                let v = match rng.random_range(0..10) {
                    0 => 0.0,
                    1 => 1.0,
                    _ => rng.random::<f64>(),
                };
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let adj = AdjacencyMatrix {
            matrix: SquareMatrix::from_rows(&a).unwrap(),
            beta: 1.0,
        };
        let tom = topological_overlap(&adj);
        let expect = tom_brute(&a);
        for i in 0..p {
            for j in 0..p {
                worst = worst.max((tom.0.get(i, j) - expect[i][j]).abs());
            }
        }
    }
    worst
}

/// Largest |roc AUC - pair-count AUC| over random vectors, n up to 1000,
/// with scores drawn from a small grid so ties are common.
pub fn auc_max_error(cases: usize, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let mut rng = stream(seed, &[2, case as u64]);
        let n = rng.random_range(2..=1000);
        let grid = rng.random_range(2..=50);
        let mut labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
        labels[0] = 0;
        labels[1] = 1;
        let scores: Vec<f64> = labels
            .iter()
            .map(|&l| f64::from(rng.random_range(0..grid)) + f64::from(l) * rng.random::<f64>())
            .collect();
        let roc = roc_curve(&scores, &labels).unwrap();
        worst = worst.max((roc.auc - auc_pairs(&scores, &labels)).abs());
    }
    worst
}

/// Number of random n=8, p=2 datasets whose root split differs from the
/// exhaustive search.
pub fn cart_root_mismatches(cases: usize, seed: u64) -> usize {
    let mut mismatches = 0;
    for case in 0..cases {
        let mut rng = stream(seed, &[3, case as u64]);
        let x: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..8).map(|_| f64::from(rng.random_range(0..6))).collect())
            .collect();
        let y: Vec<u8> = (0..8).map(|_| u8::from(rng.random::<bool>())).collect();
        let m = FeatureMatrix::from_columns(x.clone()).unwrap().with_labels(y.clone()).unwrap();
        let params = TreeParams {
            mtry: Some(2),
            ..TreeParams::default()
        };
        let rows: Vec<usize> = (0..8).collect();
        let tree = fit_tree(&m, &rows, &[0, 1], &params, &mut stream(seed, &[4, case as u64])).unwrap();
        let got = match &tree.nodes[0] {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        };
        if got != best_split_exhaustive(&x, &y, 1e-12) {
            mismatches += 1;
        }
    }
    mismatches
}

/// Largest relative error between the analytic gradient and central
/// finite differences of the objective, over random small problems.
pub fn logit_fd_max_rel_error(cases: usize, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let mut rng = stream(seed, &[5, case as u64]);
        let n = rng.random_range(5..=30);
        let d = rng.random_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
        let lambda = [0.0, 1e-3, 0.1][case % 3];
        let params: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let design = Design::from_rows(&rows);
        let g = logit_gradient(&design, &y, lambda, &params);
        let h = 1e-5;
        let fd: Vec<f64> = (0..=d)
            .map(|j| {
                let mut up = params.clone();
                let mut dn = params.clone();
                up[j] += h;
                dn[j] -= h;
                (logit_objective(&design, &y, lambda, &up) - logit_objective(&design, &y, lambda, &dn)) / (2.0 * h)
            })
            .collect();
        let diff = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = g.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-8);
        worst = worst.max(diff / scale);
    }
    worst
}

/// Tables with one missing numeric cell and donor pool 1: the imputed
/// value must be that of the observed row whose OLS predicted mean is
/// nearest. Returns (mismatches, cases checked); cases whose nearest
/// donor is not unique by a clear margin are skipped.
pub fn pmm_nearest_mismatches(cases: usize, seed: u64) -> (usize, usize) {
    let mut mismatches = 0;
    let mut checked = 0;
    for case in 0..cases {
        let mut rng = stream(seed, &[6, case as u64]);
        let n = rng.random_range(8..=40);
        let x1: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let x2: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..n)
            .map(|r| 1.0 + 2.0 * x1[r] - x2[r] + rng.random_range(-1.0..1.0))
            .collect();
        let miss = rng.random_range(0..n);

        let obs: Vec<usize> = (0..n).filter(|&r| r != miss).collect();
        let beta = ols(
            &[obs.iter().map(|&r| x1[r]).collect(), obs.iter().map(|&r| x2[r]).collect()],
            &obs.iter().map(|&r| y[r]).collect::<Vec<_>>(),
        );
        let pred = |r: usize| beta[0] + beta[1] * x1[r] + beta[2] * x2[r];
        let target = pred(miss);
        let mut dist: Vec<(f64, usize)> = obs.iter().map(|&r| ((pred(r) - target).abs(), r)).collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        if dist[1].0 - dist[0].0 < 1e-6 {
            continue;
        }
        checked += 1;

        let fmt = |v: f64| Some(format!("{v}"));
        let cols = vec![
            y.iter().enumerate().map(|(r, &v)| if r == miss { None } else { fmt(v) }).collect(),
            x1.iter().map(|&v| fmt(v)).collect(),
            x2.iter().map(|&v| fmt(v)).collect(),
        ];
        let table = RawTable::new(
            vec!["y".into(), "x1".into(), "x2".into()],
            vec![fuzzyforest::data::ColumnKind::Numeric; 3],
            cols,
        )
        .unwrap();
        let cfg = ImputeConfig {
            donor_pool_size: 1,
            rng_seed: case as u64,
            ..ImputeConfig::default()
        };
        let done = impute_pmm(&table, &cfg).unwrap();
        if done.cell(miss, 0) != Some(format!("{}", y[dist[0].1]).as_str()) {
            mismatches += 1;
        }
    }
    (mismatches, checked)
}

/// Outcome of the imputation suite; `Err` names the first violated rule.
pub fn imputation_suite(seed: u64) -> Result<(), String> {
    // Survey table masked at 1.51%: completed, observed cells untouched,
    // imputed cells drawn from the column's observed values.
    let survey = generate_survey(&SurveyConfig {
        n_rows: 800,
        missing_fraction: 0.0151,
        include_weight: false,
        seed,
        ..SurveyConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let label = survey.table.n_cols() - 1;
    let names: Vec<&str> = survey.table.names()[..label].iter().map(String::as_str).collect();
    let table = survey.table.select(&names).map_err(|e| e.to_string())?;
    let expected = (0.0151 * survey.feature_cells as f64).round() as usize;
    if table.missing_count() != expected {
        return Err(format!("mask has {} cells, expected {expected}", table.missing_count()));
    }
    let cfg = ImputeConfig {
        rng_seed: seed,
        ..ImputeConfig::default()
    };
    let done = impute_pmm(&table, &cfg).map_err(|e| e.to_string())?;
    if !done.is_complete() {
        return Err("imputed table still has missing cells".into());
    }
    for j in 0..table.n_cols() {
        let observed: HashSet<&str> = table.column(j).iter().flatten().map(String::as_str).collect();
        for r in 0..table.n_rows() {
            match table.cell(r, j) {
                Some(v) if done.cell(r, j) != Some(v) => {
                    return Err(format!("observed cell ({r}, {j}) changed"));
                }
                None if !observed.contains(done.cell(r, j).unwrap_or_default()) => {
                    return Err(format!("imputed cell ({r}, {j}) is not an observed value"));
                }
                _ => {}
            }
        }
    }
    // Idempotence on complete tables.
    let again = impute_pmm(&done, &cfg).map_err(|e| e.to_string())?;
    if again != done {
        return Err("imputing a complete table changed it".into());
    }
    // Same seed, same result.
    if impute_pmm(&table, &cfg).map_err(|e| e.to_string())? != done {
        return Err("imputation is not deterministic".into());
    }
    Ok(())
}

/// Survivor-size sequences from the library against the rule, for every
/// start size in `1..=max_start` and every stop target up to the start.
pub fn rfe_arithmetic_violations(max_start: usize) -> usize {
    let mut bad = 0;
    for start in 1..=max_start {
        for stop in 1..=start {
            let mut sizes = vec![start];
            let mut cur = start;
            while cur > stop {
                cur = next_survivor_count(cur, stop, 0.25);
                sizes.push(cur);
            }
            if sizes != schedule(start, stop, 0.75) {
                bad += 1;
            }
        }
    }
    bad
}

pub fn block_data(seed: u64) -> fuzzyforest::data::SyntheticData {
    generate_synthetic(&SynthConfig {
        n_samples: 2000,
        block_sizes: vec![20, 20, 20],
        rho: 0.7,
        informative: vec![2, 2, 1],
        seed,
        ..SynthConfig::default()
    })
    .unwrap()
}

/// ARI of auto-beta modules (min size 5) against the planted blocks.
pub fn module_recovery_ari(seed: u64) -> f64 {
    let data = block_data(seed);
    let found = find_modules(&data.matrix, &WgcnaConfig::default()).unwrap();
    adjusted_rand_index(&found.partition.assignment, &data.block_of)
}

/// Planted informative features among the top 10 selected.
pub fn planted_hits(seed: u64, screen_trees: usize, select_trees: usize) -> usize {
    let data = block_data(seed);
    let cfg = FuzzyConfig {
        final_k: 10,
        screen_trees,
        select_trees,
        seed,
        ..FuzzyConfig::default()
    };
    let result = run_pipeline(&data.matrix, &WgcnaConfig::default(), &cfg).unwrap();
    let selected = result.selected_columns();
    data.informative.iter().filter(|i| selected.contains(i)).count()
}
