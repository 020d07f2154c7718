//! Synthetic datasets with planted block correlation and planted signal.
//!
//! Block features are `sqrt(rho) * factor + sqrt(1 - rho) * noise`, so any
//! two features in the same block have population correlation `rho` and
//! features in different blocks are independent.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::matrix::{ColumnMeta, FeatureMatrix};
use crate::data::table::{ColumnKind, RawTable};
use crate::error::{Error, Result};
use crate::rng::stream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_samples: usize,
    pub block_sizes: Vec<usize>,
    /// Independent features appended after the blocks.
    pub n_noise_features: usize,
    pub rho: f64,
    /// Informative feature count per block; blocks past the end get none.
    pub informative: Vec<usize>,
    /// Coefficient on the informative sum; `f64::INFINITY` makes the label
    /// a deterministic function of the informative features.
    pub signal_strength: f64,
    pub label_noise: f64,
    /// Threshold every feature at zero to produce 0/1 indicators.
    pub indicator_output: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_samples: 2000,
            block_sizes: vec![20, 20, 20],
            n_noise_features: 0,
            rho: 0.7,
            informative: vec![2, 2, 1],
            signal_strength: 2.0,
            label_noise: 0.0,
            indicator_output: false,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n_samples == 0 {
            return bad("n_samples must be positive");
        }
        if self.block_sizes.iter().any(|&b| b == 0) {
            return bad("block sizes must be at least 1");
        }
        if self.block_sizes.is_empty() && self.n_noise_features == 0 {
            return bad("no features requested");
        }
        if !(0.0..1.0).contains(&self.rho) {
            return bad("rho must be in [0, 1)");
        }
        if !(0.0..0.5).contains(&self.label_noise) {
            return bad("label noise must be in [0, 0.5)");
        }
        if self.informative.len() > self.block_sizes.len() {
            return bad("more informative counts than blocks");
        }
        if self
            .informative
            .iter()
            .zip(&self.block_sizes)
            .any(|(i, b)| i > b)
        {
            return bad("informative count exceeds block size");
        }
        if self.signal_strength.is_nan() || self.signal_strength < 0.0 {
            return bad("signal strength must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticData {
    pub matrix: FeatureMatrix,
    /// Per column: 1-based block id, 0 for independent noise features.
    pub block_of: Vec<usize>,
    /// Column indices of the informative features, ascending.
    pub informative: Vec<usize>,
}

pub fn generate_synthetic(config: &SynthConfig) -> Result<SyntheticData> {
    config.validate()?;
    let mut rng = stream(config.seed, &[]);
    let n = config.n_samples;

    let mut block_of = Vec::new();
    let mut meta = Vec::new();
    let mut informative = Vec::new();
    for (b, &size) in config.block_sizes.iter().enumerate() {
        let start = block_of.len();
        let k = config.informative.get(b).copied().unwrap_or(0);
        let mut chosen: Vec<usize> = sample(&mut rng, size, k).into_iter().map(|i| start + i).collect();
        chosen.sort_unstable();
        informative.extend(chosen);
        for i in 0..size {
            block_of.push(b + 1);
            meta.push(ColumnMeta::numeric(format!("b{}_f{}", b + 1, i + 1)));
        }
    }
    for i in 0..config.n_noise_features {
        block_of.push(0);
        meta.push(ColumnMeta::numeric(format!("noise_{}", i + 1)));
    }
    let p = block_of.len();

    let load = config.rho.sqrt();
    let spread = (1.0 - config.rho).sqrt();
    let mut columns = vec![Vec::with_capacity(n); p];
    let mut labels = Vec::with_capacity(n);
    let mut factors = vec![0.0; config.block_sizes.len()];
    for _ in 0..n {
        for f in factors.iter_mut() {
            *f = rng.sample(StandardNormal);
        }
        for (j, col) in columns.iter_mut().enumerate() {
            let e: f64 = rng.sample(StandardNormal);
            let x = match block_of[j] {
                0 => e,
                b => load * factors[b - 1] + spread * e,
            };
            col.push(x);
        }
        let signal: f64 = informative.iter().map(|&j| columns[j].last().copied().unwrap_or_default()).sum();
        let eps: f64 = rng.sample(StandardNormal);
        let latent = if config.signal_strength.is_infinite() {
            signal
        } else {
            config.signal_strength * signal + eps
        };
        let mut label = u8::from(latent > 0.0);
        if rng.random::<f64>() < config.label_noise {
            label = 1 - label;
        }
        labels.push(label);
    }
    if config.indicator_output {
        for col in columns.iter_mut() {
            for v in col.iter_mut() {
                *v = f64::from(u8::from(*v > 0.0));
            }
        }
    }
    let matrix = FeatureMatrix::new(columns, meta)?.with_labels(labels)?;
    Ok(SyntheticData {
        matrix,
        block_of,
        informative,
    })
}

/// A categorical survey-style table: each variable is a discretized noisy
/// copy of one latent block factor, the label follows the first factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurveyConfig {
    pub n_rows: usize,
    /// Number of levels of each categorical variable.
    pub level_counts: Vec<usize>,
    pub n_blocks: usize,
    pub rho: f64,
    /// Fraction of feature cells to blank out (exact count, rounded).
    pub missing_fraction: f64,
    pub include_age: bool,
    pub include_weight: bool,
    pub seed: u64,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        SurveyConfig {
            n_rows: 1000,
            level_counts: vec![2, 3, 4, 2, 5, 3, 2, 4, 3, 2, 2, 3],
            n_blocks: 3,
            rho: 0.6,
            missing_fraction: 0.0151,
            include_age: true,
            include_weight: true,
            seed: 1,
        }
    }
}

pub const SURVEY_LABEL: &str = "vote";
pub const SURVEY_WEIGHT: &str = "weight";

#[derive(Clone, Debug)]
pub struct SurveyData {
    pub table: RawTable,
    /// Feature cells blanked by the mask.
    pub masked_cells: usize,
    /// Feature cells eligible for masking (rows times feature variables).
    pub feature_cells: usize,
    /// 1-based block of each feature variable, in column order.
    pub block_of: Vec<usize>,
}

pub fn generate_survey(config: &SurveyConfig) -> Result<SurveyData> {
    if config.n_rows == 0 || config.n_blocks == 0 || config.level_counts.is_empty() {
        return Err(Error::InvalidConfig("survey needs rows, blocks and variables".into()));
    }
    if config.level_counts.iter().any(|&c| c < 2) {
        return Err(Error::InvalidConfig("categorical variables need at least 2 levels".into()));
    }
    if !(0.0..1.0).contains(&config.rho) || !(0.0..1.0).contains(&config.missing_fraction) {
        return Err(Error::InvalidConfig("rho and missing_fraction must be in [0, 1)".into()));
    }
    let mut rng = stream(config.seed, &[]);
    let n = config.n_rows;
    let load = config.rho.sqrt();
    let spread = (1.0 - config.rho).sqrt();

    let mut names: Vec<String> = Vec::new();
    let mut kinds = Vec::new();
    let mut block_of = Vec::new();
    for (v, _) in config.level_counts.iter().enumerate() {
        names.push(format!("q{:03}", v + 1));
        kinds.push(ColumnKind::Categorical);
        block_of.push(v % config.n_blocks + 1);
    }
    if config.include_age {
        names.push("age".into());
        kinds.push(ColumnKind::Numeric);
        block_of.push(1);
    }
    let n_features = names.len();
    let mut columns: Vec<Vec<Option<String>>> = vec![Vec::with_capacity(n); n_features];
    let mut labels = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut factors = vec![0.0; config.n_blocks];
    for _ in 0..n {
        for f in factors.iter_mut() {
            *f = rng.sample(StandardNormal);
        }
        for (j, col) in columns.iter_mut().enumerate() {
            let e: f64 = rng.sample(StandardNormal);
            let z = load * factors[block_of[j] - 1] + spread * e;
            // Logistic approximation of the normal CDF.
            let u = 1.0 / (1.0 + (-1.702 * z).exp());
            let cell = match config.level_counts.get(j) {
                Some(&levels) => {
                    let level = ((u * levels as f64) as usize).min(levels - 1);
                    format!("opt{}", level + 1)
                }
                None => format!("{}", 18 + (u * 70.0) as usize),
            };
            col.push(Some(cell));
        }
        let e: f64 = rng.sample(StandardNormal);
        labels.push(if factors[0] + 0.5 * e > 0.0 { "B" } else { "A" });
        let w: f64 = rng.sample(StandardNormal);
        weights.push((0.3 * w).exp());
    }

    let feature_cells = n * n_features;
    let masked_cells = (config.missing_fraction * feature_cells as f64).round() as usize;
    for cell in sample(&mut rng, feature_cells, masked_cells) {
        columns[cell % n_features][cell / n_features] = None;
    }

    names.push(SURVEY_LABEL.into());
    kinds.push(ColumnKind::Categorical);
    columns.push(labels.into_iter().map(|l| Some(l.to_string())).collect());
    if config.include_weight {
        names.push(SURVEY_WEIGHT.into());
        kinds.push(ColumnKind::Numeric);
        columns.push(weights.into_iter().map(|w| Some(format!("{w:.6}"))).collect());
    }
    Ok(SurveyData {
        table: RawTable::new(names, kinds, columns)?,
        masked_cells,
        feature_cells,
        block_of,
    })
}
