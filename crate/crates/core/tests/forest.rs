//! Forest invariants and small statistical experiments.

use fuzzyforest::forest::{fit_forest, fit_tree, permutation_vim, TreeParams};
use fuzzyforest::rng::stream;
use fuzzyforest::FeatureMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn random_data(seed: u64, n: usize, p: usize) -> FeatureMatrix {
    let mut rng = stream(seed, &[]);
    let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let mut y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
    y[0] = 0;
    y[1] = 1;
    FeatureMatrix::from_columns(cols).unwrap().with_labels(y).unwrap()
}

/// Column 0 carries the label through noise; the rest are pure noise.
fn one_signal(seed: u64, n: usize, p: usize, strength: f64) -> FeatureMatrix {
    let mut rng = stream(seed, &[]);
    let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
    let mut cols: Vec<Vec<f64>> = vec![y
        .iter()
        .map(|&l| strength * f64::from(l) + rng.sample::<f64, _>(StandardNormal))
        .collect()];
    for _ in 1..p {
        cols.push((0..n).map(|_| rng.sample(StandardNormal)).collect());
    }
    FeatureMatrix::from_columns(cols).unwrap().with_labels(y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn class_probabilities_sum_to_one(seed in any::<u64>(), n in 10usize..40, p in 1usize..5) {
        let data = random_data(seed, n, p);
        let all: Vec<usize> = (0..p).collect();
        let forest = fit_forest(&data, &all, 5, &TreeParams::default(), seed).unwrap();
        for r in 0..n {
            let [p0, p1] = forest.predict_proba(&data.row(r)).unwrap();
            prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&p1));
        }
    }

    #[test]
    fn unrestricted_tree_fits_distinct_in_bag_rows(seed in any::<u64>(), n in 5usize..60, p in 1usize..4) {
        let data = random_data(seed, n, p);
        let all: Vec<usize> = (0..p).collect();
        let params = TreeParams { mtry: Some(p), ..TreeParams::default() };
        let mut rng = stream(seed, &[1]);
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let tree = fit_tree(&data, &rows, &all, &params, &mut rng).unwrap();
        let labels = data.labels().unwrap();
        for &r in &tree.in_bag {
            prop_assert_eq!(tree.predict_class(|f| data.value(r, f)), labels[r]);
        }
    }

    #[test]
    fn swapping_classes_swaps_probabilities(seed in any::<u64>(), n in 10usize..40) {
        let data = random_data(seed, n, 3);
        let flipped = data.map_labels(|_, l| 1 - l).unwrap();
        let all = [0, 1, 2];
        let a = fit_forest(&data, &all, 7, &TreeParams::default(), seed).unwrap();
        let b = fit_forest(&flipped, &all, 7, &TreeParams::default(), seed).unwrap();
        for r in 0..n {
            let pa = a.predict_proba(&data.row(r)).unwrap();
            let pb = b.predict_proba(&data.row(r)).unwrap();
            prop_assert!((pa[0] - pb[1]).abs() < 1e-12);
        }
    }
}

#[test]
fn fits_and_importances_do_not_depend_on_thread_count() {
    let data = one_signal(3, 300, 8, 1.0);
    let all: Vec<usize> = (0..8).collect();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let forest = fit_forest(&data, &all, 40, &TreeParams::default(), 9).unwrap();
            let vim = permutation_vim(&forest, &data, 10).unwrap();
            (forest.to_json().unwrap(), vim)
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn bootstrap_keeps_about_632_percent_unique_rows() {
    let data = random_data(4, 1000, 1);
    let forest = fit_forest(&data, &[0], 50, &TreeParams::default(), 4).unwrap();
    let unique: f64 = forest.trees.iter().map(|t| t.in_bag.len() as f64 / 1000.0).sum::<f64>() / 50.0;
    assert!((unique - 0.632).abs() <= 0.02, "unique fraction {unique}");
    for t in &forest.trees {
        assert_eq!(t.in_bag.len() + t.oob.len(), 1000);
        assert_eq!(t.in_bag_counts.iter().sum::<u32>(), 1000);
    }
}

#[test]
fn predictive_feature_ranks_first() {
    let all: Vec<usize> = (0..5).collect();
    let firsts = (0..100)
        .filter(|&seed| {
            let data = one_signal(seed, 200, 5, 1.5);
            let forest = fit_forest(&data, &all, 50, &TreeParams::default(), seed).unwrap();
            permutation_vim(&forest, &data, seed).unwrap().ranking[0] == 0
        })
        .count();
    assert!(firsts >= 95, "ranked first in {firsts}/100 runs");
}

#[test]
fn null_importances_center_on_zero() {
    let all: Vec<usize> = (0..5).collect();
    let mut vims = Vec::new();
    for seed in 0..30 {
        let data = random_data(100 + seed, 200, 5);
        let forest = fit_forest(&data, &all, 100, &TreeParams::default(), seed).unwrap();
        vims.extend(permutation_vim(&forest, &data, seed).unwrap().importance);
    }
    let n = vims.len() as f64;
    let mean = vims.iter().sum::<f64>() / n;
    let sd = (vims.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() <= 3.0 * sd / n.sqrt(), "mean {mean}, sd {sd}");
}

#[test]
fn duplicating_a_feature_dilutes_its_importance() {
    let base = one_signal(7, 400, 4, 2.0);
    let mut cols = base.columns().to_vec();
    cols.push(cols[0].clone());
    let dup = FeatureMatrix::from_columns(cols)
        .unwrap()
        .with_labels(base.labels().unwrap().to_vec())
        .unwrap();
    let alone = {
        let f = fit_forest(&base, &[0, 1, 2, 3], 200, &TreeParams::default(), 7).unwrap();
        permutation_vim(&f, &base, 7).unwrap().importance_of(0).unwrap()
    };
    let (shared, twin) = {
        let f = fit_forest(&dup, &[0, 1, 2, 3, 4], 200, &TreeParams::default(), 7).unwrap();
        let v = permutation_vim(&f, &dup, 7).unwrap();
        (v.importance_of(0).unwrap(), v.importance_of(4).unwrap())
    };
    assert!(shared < 0.75 * alone, "alone {alone}, with duplicate {shared}");
    assert!(twin > 0.0);
}
