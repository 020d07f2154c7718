//! Binary-classification CART trees grown on bootstrap samples.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

/// Improvements smaller than this are treated as ties.
const GAIN_EPS: f64 = 1e-12;

/// `1 - sum_k (c_k / N)^2`.
pub fn gini_impurity(class_counts: &[u64]) -> Result<f64> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidConfig("gini impurity of an empty node".into()));
    }
    let total = total as f64;
    Ok(1.0 - class_counts.iter().map(|&c| (c as f64 / total).powi(2)).sum::<f64>())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Candidate features per split; `None` means `ceil(sqrt(p))`.
    pub mtry: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub min_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            mtry: None,
            max_depth: None,
            min_leaf: 1,
            min_split: 2,
        }
    }
}

impl TreeParams {
    /// The effective mtry for a subset of `p` features.
    pub fn resolve_mtry(&self, p: usize) -> Result<usize> {
        if p == 0 {
            return Err(Error::EmptyFeatureSet);
        }
        let mtry = self.mtry.unwrap_or_else(|| (p as f64).sqrt().ceil() as usize);
        if mtry == 0 || mtry > p {
            return Err(Error::InvalidConfig(format!("mtry {mtry} outside 1..={p}")));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidConfig("min_leaf must be at least 1".into()));
        }
        Ok(mtry)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// In-bag class counts (bootstrap multiplicity included).
    Leaf { counts: [u32; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// `nodes[0]` is the root.
    pub nodes: Vec<Node>,
    /// Distinct in-bag rows, ascending, with their bootstrap multiplicity.
    pub in_bag: Vec<usize>,
    pub in_bag_counts: Vec<u32>,
    /// Rows never drawn, ascending.
    pub oob: Vec<usize>,
}

impl Tree {
    /// Leaf class counts for a row given by a value accessor.
    #[inline]
    pub fn leaf_counts(&self, value: impl Fn(usize) -> f64) -> [u32; 2] {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => idx = if value(*feature) <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn proba(&self, value: impl Fn(usize) -> f64) -> [f64; 2] {
        let counts = self.leaf_counts(value);
        let total = f64::from(counts[0] + counts[1]);
        [f64::from(counts[0]) / total, f64::from(counts[1]) / total]
    }

    /// Majority class of the reached leaf; ties go to class 0.
    #[inline]
    pub fn predict_class(&self, value: impl Fn(usize) -> f64) -> u8 {
        let counts = self.leaf_counts(value);
        u8::from(counts[1] > counts[0])
    }

    /// `predict_class` that also appends the feature of every split on the
    /// path taken.
    pub fn predict_class_tracing(&self, value: impl Fn(usize) -> f64, path: &mut Vec<usize>) -> u8 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { counts } => return u8::from(counts[1] > counts[0]),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    path.push(*feature);
                    idx = if value(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Whether any split uses `feature`.
    pub fn uses_feature(&self, feature: usize) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n, Node::Split { feature: f, .. } if *f == feature))
    }
}

struct BestSplit {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

struct Task {
    start: usize,
    end: usize,
    depth: usize,
    node: usize,
}

/// Grows one tree on the bootstrap multiset `rows`, considering only
/// `features`. At every node `mtry` features are drawn without replacement
/// and the (feature, midpoint threshold) pair with the lowest weighted child
/// Gini wins; ties go to the lower column index, then the lower threshold.
pub fn fit_tree<R: Rng + ?Sized>(
    data: &FeatureMatrix,
    rows: &[usize],
    features: &[usize],
    params: &TreeParams,
    rng: &mut R,
) -> Result<Tree> {
    let labels = data.labels()?;
    let mtry = params.resolve_mtry(features.len())?;
    if rows.is_empty() {
        return Err(Error::InvalidConfig("empty bootstrap sample".into()));
    }
    let n = data.n_rows();
    let mut multiplicity = vec![0u32; n];
    for &r in rows {
        multiplicity[r] += 1;
    }
    let in_bag: Vec<usize> = (0..n).filter(|&r| multiplicity[r] > 0).collect();
    let in_bag_counts: Vec<u32> = in_bag.iter().map(|&r| multiplicity[r]).collect();
    let oob: Vec<usize> = (0..n).filter(|&r| multiplicity[r] == 0).collect();

    let mut items: Vec<(usize, u32)> = in_bag.iter().copied().zip(in_bag_counts.iter().copied()).collect();
    let mut nodes = vec![Node::Leaf { counts: [0, 0] }];
    let mut stack = vec![Task {
        start: 0,
        end: items.len(),
        depth: 0,
        node: 0,
    }];
    let mut scratch: Vec<(f64, u8, u32)> = Vec::with_capacity(items.len());

    while let Some(task) = stack.pop() {
        let node_items = &mut items[task.start..task.end];
        let mut counts = [0u32; 2];
        for &(r, c) in node_items.iter() {
            counts[usize::from(labels[r])] += c;
        }
        let total = counts[0] + counts[1];
        let at_depth_cap = params.max_depth.is_some_and(|d| task.depth >= d);
        if counts[0] == 0 || counts[1] == 0 || at_depth_cap || (total as usize) < params.min_split {
            nodes[task.node] = Node::Leaf { counts };
            continue;
        }

        let mut candidates: Vec<usize> = sample(rng, features.len(), mtry)
            .into_iter()
            .map(|i| features[i])
            .collect();
        candidates.sort_unstable();

        let mut best: Option<BestSplit> = None;
        for &feature in &candidates {
            let column = data.column(feature);
            scratch.clear();
            scratch.extend(node_items.iter().map(|&(r, c)| (column[r], labels[r], c)));
            // Equal values are pooled before any threshold is scored, so the
            // order among ties does not matter.
            scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            if let Some((impurity, threshold)) = best_threshold(&scratch, counts, params.min_leaf) {
                if best.as_ref().is_none_or(|b| impurity < b.impurity - GAIN_EPS) {
                    best = Some(BestSplit {
                        impurity,
                        feature,
                        threshold,
                    });
                }
            }
        }

        let parent = node_gini(counts);
        match best {
            Some(split) if split.impurity < parent - GAIN_EPS => {
                let column = data.column(split.feature);
                let mid = partition(node_items, |&(r, _)| column[r] <= split.threshold);
                let left = nodes.len();
                let right = left + 1;
                nodes.push(Node::Leaf { counts: [0, 0] });
                nodes.push(Node::Leaf { counts: [0, 0] });
                nodes[task.node] = Node::Split {
                    feature: split.feature,
                    threshold: split.threshold,
                    left,
                    right,
                };
                stack.push(Task {
                    start: task.start + mid,
                    end: task.end,
                    depth: task.depth + 1,
                    node: right,
                });
                stack.push(Task {
                    start: task.start,
                    end: task.start + mid,
                    depth: task.depth + 1,
                    node: left,
                });
            }
            _ => nodes[task.node] = Node::Leaf { counts },
        }
    }

    Ok(Tree {
        nodes,
        in_bag,
        in_bag_counts,
        oob,
    })
}

fn node_gini(counts: [u32; 2]) -> f64 {
    let total = f64::from(counts[0] + counts[1]);
    1.0 - (f64::from(counts[0]).powi(2) + f64::from(counts[1]).powi(2)) / (total * total)
}

/// Best midpoint split of value-sorted `(value, label, multiplicity)` items:
/// `(weighted child gini, threshold)`, or `None` if no valid split exists.
fn best_threshold(sorted: &[(f64, u8, u32)], counts: [u32; 2], min_leaf: usize) -> Option<(f64, f64)> {
    let total = f64::from(counts[0] + counts[1]);
    let mut left = [0u32; 2];
    let mut best: Option<(f64, f64)> = None;
    for i in 0..sorted.len() - 1 {
        let (value, label, count) = sorted[i];
        left[usize::from(label)] += count;
        let next = sorted[i + 1].0;
        if next <= value {
            continue;
        }
        let n_left = left[0] + left[1];
        let n_right = counts[0] + counts[1] - n_left;
        if (n_left as usize) < min_leaf || (n_right as usize) < min_leaf {
            continue;
        }
        let right = [counts[0] - left[0], counts[1] - left[1]];
        let impurity = (f64::from(n_left) * node_gini(left) + f64::from(n_right) * node_gini(right)) / total;
        if best.is_none_or(|(b, _)| impurity < b - GAIN_EPS) {
            let mut threshold = value + (next - value) / 2.0;
            if threshold >= next {
                threshold = value;
            }
            best = Some((impurity, threshold));
        }
    }
    best
}

/// In-place partition; returns the count of `pred`-true items,
/// which end up first.
fn partition<T>(items: &mut [T], pred: impl Fn(&T) -> bool) -> usize {
    let mut mid = 0;
    for i in 0..items.len() {
        if pred(&items[i]) {
            items.swap(i, mid);
            mid += 1;
        }
    }
    mid
}
