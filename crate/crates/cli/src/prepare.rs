//! The ingest pipeline shared by every downstream command: load, split off
//! label and weight columns, impute, one-hot encode.

use std::path::Path;

use anyhow::{bail, Context, Result};
use fuzzyforest::data::{
    binary_labels, impute_pmm, load_csv, missingness_report, one_hot_encode, parse_weights, CovariatePolicy,
    ImputeConfig, LoadOptions, MissingnessReport, RawTable,
};
use fuzzyforest::rng::{derive_seed, tag};
use fuzzyforest::FeatureMatrix;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub struct Prepared {
    /// Feature columns as loaded, before imputation.
    pub raw: RawTable,
    pub report: MissingnessReport,
    /// Encoded features with labels and, if configured, weights.
    pub matrix: FeatureMatrix,
    /// Outcome level names indexed by class.
    pub label_levels: Vec<String>,
}

impl Prepared {
    pub fn labels(&self) -> &[u8] {
        self.matrix.labels().expect("prepared matrices are labeled")
    }
}

pub fn load_table(cfg: &RunConfig, path: &Path) -> Result<RawTable> {
    let options = LoadOptions {
        sentinels: cfg.missing_sentinels.clone(),
        ..LoadOptions::default()
    };
    load_csv(path, &options).with_context(|| format!("loading {}", path.display()))
}

pub fn prepare(mut table: RawTable, cfg: &RunConfig, seed: u64) -> Result<Prepared> {
    let (_, label_cells) = table
        .take_column(&cfg.label_column)
        .with_context(|| format!("label column `{}`", cfg.label_column))?;
    let (labels, label_levels) = binary_labels(&cfg.label_column, &label_cells)?;
    let weights = match &cfg.weight_column {
        Some(name) => {
            let (_, cells) = table
                .take_column(name)
                .with_context(|| format!("weight column `{name}`"))?;
            Some(parse_weights(name, &cells)?)
        }
        None => None,
    };
    if table.n_cols() == 0 {
        bail!("no feature columns left after removing label and weight columns");
    }

    let report = missingness_report(&table);
    let impute = ImputeConfig {
        donor_pool_size: cfg.impute.donor_pool_size,
        rng_seed: derive_seed(seed, &[tag::IMPUTE]),
        covariates: CovariatePolicy::AllComplete,
    };
    let imputed = impute_pmm(&table, &impute).context("imputing missing cells")?;
    let mut matrix = one_hot_encode(&imputed)?.with_labels(labels)?;
    if let Some(w) = weights {
        matrix = matrix.with_weights(w)?;
    }
    Ok(Prepared {
        raw: table,
        report,
        matrix,
        label_levels,
    })
}

/// Ground truth of a synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub kind: String,
    /// Source variables that drive the label.
    pub signal_variables: Vec<String>,
    /// Planted block of every feature variable; 0 for independent noise.
    pub blocks: Vec<(String, usize)>,
    pub masked_cells: usize,
}

pub fn load_truth(path: &Path) -> Result<Truth> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    let truth = doc
        .get("truth")
        .with_context(|| format!("{} has no `truth` object", path.display()))?;
    Ok(serde_json::from_value(truth.clone())?)
}

/// Signal variables with at least one selected column derived from them.
pub fn recovered(truth: &Truth, matrix: &FeatureMatrix, selected: &[usize]) -> Vec<String> {
    truth
        .signal_variables
        .iter()
        .filter(|v| selected.iter().any(|&c| matrix.meta()[c].source == **v))
        .cloned()
        .collect()
}
