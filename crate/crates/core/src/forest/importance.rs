use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::forest::ensemble::Forest;
use crate::rng::{stream, tag};

/// Per-feature importances of a fitted forest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VimTable {
    /// Column indices, in the forest's feature order.
    pub features: Vec<usize>,
    pub importance: Vec<f64>,
    /// Column indices by descending importance, ties by ascending index.
    pub ranking: Vec<usize>,
}

impl VimTable {
    pub fn new(features: Vec<usize>, importance: Vec<f64>) -> VimTable {
        let mut order: Vec<usize> = (0..features.len()).collect();
        order.sort_by(|&a, &b| {
            importance[b]
                .total_cmp(&importance[a])
                .then(features[a].cmp(&features[b]))
        });
        let ranking = order.iter().map(|&i| features[i]).collect();
        VimTable {
            features,
            importance,
            ranking,
        }
    }

    pub fn importance_of(&self, feature: usize) -> Option<f64> {
        self.features
            .iter()
            .position(|&f| f == feature)
            .map(|i| self.importance[i])
    }

    /// `(column, importance)` pairs in rank order.
    pub fn ranked(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.ranking
            .iter()
            .map(|&f| (f, self.importance_of(f).unwrap_or_default()))
    }

    pub fn top(&self, k: usize) -> Vec<usize> {
        self.ranking.iter().take(k).copied().collect()
    }
}

/// Permutation importance: for each tree, the drop in out-of-bag accuracy
/// when one feature's out-of-bag values are shuffled, averaged over all
/// trees. Trees with no out-of-bag rows, or that never split on the
/// feature, contribute zero.
pub fn permutation_vim(forest: &Forest, data: &FeatureMatrix, seed: u64) -> Result<VimTable> {
    let labels = data.labels()?;
    if data.n_rows() != forest.n_rows {
        return Err(Error::DimensionMismatch(format!(
            "forest trained on {} rows, data has {}",
            forest.n_rows,
            data.n_rows()
        )));
    }
    let p = forest.features.len();
    let mut position = vec![None; data.n_cols()];
    for (i, &f) in forest.features.iter().enumerate() {
        position[f] = Some(i);
    }
    let per_tree: Vec<Vec<f64>> = forest
        .trees
        .par_iter()
        .enumerate()
        .map(|(t, tree)| {
            let mut drops = vec![0.0; p];
            if tree.oob.is_empty() {
                return drops;
            }
            let mut rng = stream(seed, &[tag::VIM, t as u64]);
            let oob = &tree.oob;
            // Permuting a feature can only change rows whose path tests it,
            // so record each row's baseline outcome and path features once.
            let mut correct = Vec::with_capacity(oob.len());
            let mut rows_testing: Vec<Vec<usize>> = vec![Vec::new(); p];
            let mut on_path = Vec::new();
            for (k, &r) in oob.iter().enumerate() {
                on_path.clear();
                let class = tree.predict_class_tracing(|f| data.value(r, f), &mut on_path);
                correct.push(class == labels[r]);
                on_path.sort_unstable();
                on_path.dedup();
                for &f in &on_path {
                    if let Some(i) = position[f] {
                        rows_testing[i].push(k);
                    }
                }
            }
            let baseline = correct.iter().filter(|&&c| c).count();
            let mut shuffled = Vec::with_capacity(oob.len());
            for (i, &feature) in forest.features.iter().enumerate() {
                if !tree.uses_feature(feature) {
                    continue;
                }
                let column = data.column(feature);
                shuffled.clear();
                shuffled.extend(oob.iter().map(|&r| column[r]));
                shuffled.shuffle(&mut rng);
                let mut permuted = baseline;
                for &k in &rows_testing[i] {
                    let r = oob[k];
                    let v = shuffled[k];
                    let class = tree.predict_class(|f| if f == feature { v } else { data.value(r, f) });
                    permuted = permuted + usize::from(class == labels[r]) - usize::from(correct[k]);
                }
                drops[i] = (baseline as f64 - permuted as f64) / oob.len() as f64;
            }
            drops
        })
        .collect();

    let n_trees = forest.trees.len() as f64;
    let importance = (0..p)
        .map(|i| per_tree.iter().map(|d| d[i]).sum::<f64>() / n_trees)
        .collect();
    Ok(VimTable::new(forest.features.clone(), importance))
}
