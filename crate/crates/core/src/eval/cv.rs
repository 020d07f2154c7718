use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::eval::folds::FoldPlan;
use crate::eval::logit::{fit_logit, LogitModel, LogitOptions};
use crate::eval::roc::{roc_curve, RocCurve};
use crate::forest::{fit_forest, Forest, TreeParams};
use crate::fuzzy::{run_pipeline, FuzzyConfig};
use crate::rng::{derive_seed, tag};
use crate::wgcna::WgcnaConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    /// The full selection pipeline, re-run inside each training split; the
    /// final forest on the selected features does the scoring.
    FuzzyTopK { wgcna: WgcnaConfig, fuzzy: FuzzyConfig },
    /// A forest on every column.
    FullForest { n_trees: usize, params: TreeParams },
    Logit(LogitOptions),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::FuzzyTopK { .. } => "fuzzy_forest",
            ModelSpec::FullForest { .. } => "random_forest",
            ModelSpec::Logit(_) => "logit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FittedModel {
    Forest(Forest),
    Logit(LogitModel),
}

impl FittedModel {
    pub fn features(&self) -> &[usize] {
        match self {
            FittedModel::Forest(f) => &f.features,
            FittedModel::Logit(m) => &m.features,
        }
    }

    pub fn predict_scores(&self, data: &FeatureMatrix) -> Result<Vec<f64>> {
        match self {
            FittedModel::Forest(f) => f.predict_scores(data),
            FittedModel::Logit(m) => m.predict_scores(data),
        }
    }
}

/// Trains `spec` on `train`. `seed` replaces any seed inside the spec.
pub fn fit_model(spec: &ModelSpec, train: &FeatureMatrix, seed: u64) -> Result<FittedModel> {
    match spec {
        ModelSpec::FuzzyTopK { wgcna, fuzzy } => {
            let config = FuzzyConfig {
                seed,
                ..fuzzy.clone()
            };
            Ok(FittedModel::Forest(run_pipeline(train, wgcna, &config)?.final_forest))
        }
        ModelSpec::FullForest { n_trees, params } => {
            let all: Vec<usize> = (0..train.n_cols()).collect();
            Ok(FittedModel::Forest(fit_forest(train, &all, *n_trees, params, seed)?))
        }
        ModelSpec::Logit(options) => {
            let all: Vec<usize> = (0..train.n_cols()).collect();
            Ok(FittedModel::Logit(fit_logit(train, &all, options)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub auc: f64,
    pub n_train: usize,
    pub n_test: usize,
    /// Columns the fold's model used.
    pub features: Vec<usize>,
    pub roc: RocCurve,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub model: String,
    pub folds: Vec<FoldOutcome>,
    pub mean_auc: f64,
    pub sd_auc: f64,
    /// Fold with the highest AUC, ties to the lower index.
    pub best_fold: usize,
    /// ROC over all held-out scores pooled.
    pub pooled_roc: RocCurve,
    pub best_model: FittedModel,
}

impl CvResult {
    pub fn best_roc(&self) -> &RocCurve {
        &self.folds[self.best_fold].roc
    }
}

/// Trains on k-1 folds and scores the held-out fold, for every fold. Each
/// fold has its own seed, so folds run in parallel without affecting the
/// result.
pub fn cross_validate(spec: &ModelSpec, data: &FeatureMatrix, plan: &FoldPlan, seed: u64) -> Result<CvResult> {
    let labels = data.labels()?;
    if plan.assignment.len() != data.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "fold plan covers {} rows, data has {}",
            plan.assignment.len(),
            data.n_rows()
        )));
    }
    let fitted = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let train_rows = plan.train_rows(fold);
            let test_rows = plan.test_rows(fold);
            let test_labels: Vec<u8> = test_rows.iter().map(|&r| labels[r]).collect();
            if test_labels.iter().all(|&l| l == test_labels[0]) {
                return Err(Error::SingleClassFold { fold });
            }
            let train = data.subset_rows(&train_rows);
            let test = data.subset_rows(&test_rows);
            let model = fit_model(spec, &train, derive_seed(seed, &[tag::FOLD, fold as u64]))?;
            let scores = model.predict_scores(&test)?;
            let roc = roc_curve(&scores, &test_labels)?;
            Ok((
                FoldOutcome {
                    fold,
                    auc: roc.auc,
                    n_train: train_rows.len(),
                    n_test: test_rows.len(),
                    features: model.features().to_vec(),
                    roc,
                },
                model,
                test_rows,
                scores,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pooled = vec![0.0; data.n_rows()];
    for (_, _, rows, scores) in &fitted {
        for (&r, &s) in rows.iter().zip(scores) {
            pooled[r] = s;
        }
    }
    let pooled_roc = roc_curve(&pooled, labels)?;
    let aucs: Vec<f64> = fitted.iter().map(|f| f.0.auc).collect();
    let k = aucs.len() as f64;
    let mean_auc = aucs.iter().sum::<f64>() / k;
    let sd_auc = if aucs.len() > 1 {
        (aucs.iter().map(|a| (a - mean_auc).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    let best_fold = (0..aucs.len())
        .fold(0, |best, f| if aucs[f] > aucs[best] { f } else { best });
    let mut folds = Vec::with_capacity(fitted.len());
    let mut best_model = None;
    for (outcome, model, _, _) in fitted {
        if outcome.fold == best_fold {
            best_model = Some(model);
        }
        folds.push(outcome);
    }
    Ok(CvResult {
        model: spec.name().to_string(),
        folds,
        mean_auc,
        sd_auc,
        best_fold,
        pooled_roc,
        best_model: best_model.expect("best fold exists"),
    })
}
