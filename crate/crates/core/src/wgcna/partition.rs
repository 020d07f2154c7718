use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wgcna::linkage::Dendrogram;

pub const GREY: usize = 0;

/// Module colors in the conventional WGCNA order; index 0 is grey.
const PALETTE: &[&str] = &[
    "grey",
    "turquoise",
    "blue",
    "brown",
    "yellow",
    "green",
    "red",
    "black",
    "pink",
    "magenta",
    "purple",
    "greenyellow",
    "tan",
    "salmon",
    "cyan",
    "midnightblue",
    "lightcyan",
    "grey60",
    "lightgreen",
    "lightyellow",
    "royalblue",
    "darkred",
    "darkgreen",
    "darkturquoise",
    "darkgrey",
    "orange",
    "darkorange",
    "white",
    "skyblue",
    "saddlebrown",
    "steelblue",
    "paleturquoise",
    "violet",
    "darkolivegreen",
    "darkmagenta",
];

pub fn module_color(id: usize) -> String {
    PALETTE
        .get(id)
        .map_or_else(|| format!("module{id}"), |c| c.to_string())
}

/// Assignment of every feature to one module; module 0 is the grey
/// catch-all, modules `1..=m` are numbered by decreasing size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulePartition {
    pub assignment: Vec<usize>,
    pub colors: Vec<String>,
    pub min_module_size: usize,
}

impl ModulePartition {
    pub fn from_assignment(assignment: Vec<usize>, min_module_size: usize) -> Self {
        let max_id = assignment.iter().copied().max().unwrap_or(0);
        ModulePartition {
            colors: (0..=max_id).map(module_color).collect(),
            assignment,
            min_module_size,
        }
    }

    pub fn n_features(&self) -> usize {
        self.assignment.len()
    }

    /// Non-grey module count.
    pub fn n_modules(&self) -> usize {
        self.colors.len() - 1
    }

    pub fn members(&self, module: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&j| self.assignment[j] == module)
            .collect()
    }

    /// Sizes indexed by module id (grey first).
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.colors.len()];
        for &m in &self.assignment {
            sizes[m] += 1;
        }
        sizes
    }

    pub fn color_of(&self, feature: usize) -> &str {
        &self.colors[self.assignment[feature]]
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Static height cut: every maximal subtree whose root merged at or below
/// `cut_height` is a cluster; clusters smaller than `min_module_size` go
/// to grey. Surviving clusters are numbered by decreasing size, ties by
/// their smallest member.
pub fn cut_modules(dend: &Dendrogram, cut_height: f64, min_module_size: usize) -> Result<ModulePartition> {
    if !(cut_height >= 0.0) {
        return Err(Error::InvalidConfig(format!("cut height {cut_height} must be >= 0")));
    }
    if min_module_size == 0 {
        return Err(Error::InvalidConfig("min_module_size must be at least 1".into()));
    }
    let p = dend.n_leaves;
    let mut parent: Vec<usize> = (0..p).collect();
    // Representative leaf of each node id.
    let mut rep: Vec<usize> = (0..p).collect();
    for m in &dend.merges {
        let (a, b) = (rep[m.left], rep[m.right]);
        rep.push(a);
        if m.height <= cut_height {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut clusters: HashMap<usize, Vec<usize>> = HashMap::new();
    for j in 0..p {
        let root = find(&mut parent, j);
        clusters.entry(root).or_default().push(j);
    }
    let mut kept: Vec<Vec<usize>> = clusters
        .into_values()
        .filter(|members| members.len() >= min_module_size)
        .collect();
    kept.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let mut assignment = vec![GREY; p];
    for (i, members) in kept.iter().enumerate() {
        for &j in members {
            assignment[j] = i + 1;
        }
    }
    Ok(ModulePartition::from_assignment(assignment, min_module_size))
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings differ in length");
    let n = a.len();
    let pairs = |x: usize| (x * x.saturating_sub(1) / 2) as f64;
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_a * sum_b / total;
    let max_index = (sum_a + sum_b) / 2.0;
    if (max_index - expected).abs() < f64::EPSILON {
        return if index == max_index { 1.0 } else { 0.0 };
    }
    (index - expected) / (max_index - expected)
}
