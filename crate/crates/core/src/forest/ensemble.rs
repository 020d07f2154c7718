use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::forest::tree::{fit_tree, Tree, TreeParams};
use crate::rng::{stream, tag};

pub const FOREST_FORMAT: &str = "fuzzyforest/forest";
pub const FOREST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    /// Column indices (into the training matrix) the trees may split on.
    pub features: Vec<usize>,
    pub feature_names: Vec<String>,
    pub n_rows: usize,
    pub params: TreeParams,
    pub mtry: usize,
    pub seed: u64,
    pub trees: Vec<Tree>,
}

/// Fits `n_trees` trees, each on a bootstrap of `n` rows drawn with
/// probability proportional to the observation weights (uniform when the
/// matrix has none). Tree `t` uses its own stream keyed by `(seed, t)`, so
/// the result does not depend on the thread pool.
pub fn fit_forest(
    data: &FeatureMatrix,
    features: &[usize],
    n_trees: usize,
    params: &TreeParams,
    seed: u64,
) -> Result<Forest> {
    if features.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    if n_trees == 0 {
        return Err(Error::InvalidConfig("n_trees must be at least 1".into()));
    }
    if let Some(&bad) = features.iter().find(|&&f| f >= data.n_cols()) {
        return Err(Error::DimensionMismatch(format!(
            "feature {bad} out of range for {} columns",
            data.n_cols()
        )));
    }
    let mut sorted = features.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != features.len() {
        return Err(Error::InvalidConfig("duplicate features in subset".into()));
    }
    data.labels()?;
    let n = data.n_rows();
    if n == 0 {
        return Err(Error::InvalidConfig("no rows to fit".into()));
    }
    let mtry = params.resolve_mtry(features.len())?;
    let sampler = match data.weights() {
        Some(w) => Some(WeightedIndex::new(w).map_err(|e| Error::InvalidWeights(e.to_string()))?),
        None => None,
    };

    let trees = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, &[tag::TREE, t as u64]);
            let rows = bootstrap(n, sampler.as_ref(), &mut rng);
            fit_tree(data, &rows, features, params, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Forest {
        features: features.to_vec(),
        feature_names: features.iter().map(|&f| data.name(f).to_string()).collect(),
        n_rows: n,
        params: params.clone(),
        mtry,
        seed,
        trees,
    })
}

pub(crate) fn bootstrap<R: Rng + ?Sized>(n: usize, sampler: Option<&WeightedIndex<f64>>, rng: &mut R) -> Vec<usize> {
    match sampler {
        Some(dist) => (0..n).map(|_| dist.sample(rng)).collect(),
        None => (0..n).map(|_| rng.random_range(0..n)).collect(),
    }
}

impl Forest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    fn check_row(&self, row: &[f64]) -> Result<()> {
        for &f in &self.features {
            match row.get(f) {
                Some(v) if v.is_finite() => {}
                _ => return Err(Error::MissingFeature(f)),
            }
        }
        Ok(())
    }

    /// Mean of the per-tree leaf class frequencies. `row` is indexed by
    /// training-matrix column.
    pub fn predict_proba(&self, row: &[f64]) -> Result<[f64; 2]> {
        self.check_row(row)?;
        Ok(self.proba_unchecked(|f| row[f]))
    }

    fn proba_unchecked(&self, value: impl Fn(usize) -> f64 + Copy) -> [f64; 2] {
        let mut sum = [0.0; 2];
        for tree in &self.trees {
            let p = tree.proba(value);
            sum[0] += p[0];
            sum[1] += p[1];
        }
        let k = self.trees.len() as f64;
        let p1 = sum[1] / k;
        [1.0 - p1, p1]
    }

    /// Class-1 probability for every row of `data`.
    pub fn predict_scores(&self, data: &FeatureMatrix) -> Result<Vec<f64>> {
        if let Some(&bad) = self.features.iter().find(|&&f| f >= data.n_cols()) {
            return Err(Error::MissingFeature(bad));
        }
        Ok((0..data.n_rows())
            .into_par_iter()
            .map(|r| self.proba_unchecked(|f| data.value(r, f))[1])
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ForestDocumentRef {
            format: FOREST_FORMAT,
            version: FOREST_VERSION,
            forest: self,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Forest> {
        let doc: ForestDocument = serde_json::from_str(text)?;
        if doc.format != FOREST_FORMAT || doc.version != FOREST_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported forest document {} v{}",
                doc.format, doc.version
            )));
        }
        Ok(doc.forest)
    }
}

#[derive(Serialize)]
struct ForestDocumentRef<'a> {
    format: &'static str,
    version: u32,
    forest: &'a Forest,
}

#[derive(Deserialize)]
struct ForestDocument {
    format: String,
    version: u32,
    forest: Forest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OobError {
    pub error: f64,
    /// Rows with at least one out-of-bag tree.
    pub scored: usize,
    /// Rows in-bag for every tree, excluded from the rate.
    pub skipped: usize,
}

/// Misclassification rate of out-of-bag majority votes. Vote ties fall back
/// to the summed leaf probabilities, then to class 0.
pub fn oob_error(forest: &Forest, data: &FeatureMatrix) -> Result<OobError> {
    let labels = data.labels()?;
    if data.n_rows() != forest.n_rows {
        return Err(Error::DimensionMismatch(format!(
            "forest trained on {} rows, data has {}",
            forest.n_rows,
            data.n_rows()
        )));
    }
    let n = data.n_rows();
    let mut votes = vec![[0u32; 2]; n];
    let mut mass = vec![[0.0f64; 2]; n];
    for tree in &forest.trees {
        for &r in &tree.oob {
            let p = tree.proba(|f| data.value(r, f));
            votes[r][usize::from(p[1] > p[0])] += 1;
            mass[r][0] += p[0];
            mass[r][1] += p[1];
        }
    }
    let mut wrong = 0usize;
    let mut scored = 0usize;
    for r in 0..n {
        let v = votes[r];
        if v[0] + v[1] == 0 {
            continue;
        }
        scored += 1;
        let predicted = if v[0] != v[1] {
            u8::from(v[1] > v[0])
        } else {
            u8::from(mass[r][1] > mass[r][0])
        };
        if predicted != labels[r] {
            wrong += 1;
        }
    }
    if scored == 0 {
        return Err(Error::NoOutOfBagRows);
    }
    Ok(OobError {
        error: wrong as f64 / scored as f64,
        scored,
        skipped: n - scored,
    })
}
