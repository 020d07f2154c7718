use std::path::Path;

use anyhow::{bail, Context as _, Result};
use fuzzyforest::eval::{cross_validate, kfold_split, CvResult, ModelSpec};
use fuzzyforest::{FeatureMatrix, Forest};
use log::warn;
use serde_json::json;

use super::Context;
use crate::output::{num, Header};
use crate::prepare::Prepared;
use crate::svg;

/// A fixed feature set taken from a saved forest.
pub struct FixedFeatures {
    pub names: Vec<String>,
}

pub fn load_forest_features(path: &Path) -> Result<FixedFeatures> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let forest = Forest::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(FixedFeatures {
        names: forest.feature_names,
    })
}

fn column_subset(m: &FeatureMatrix, names: &[String]) -> Result<FeatureMatrix> {
    let mut columns = Vec::new();
    let mut meta = Vec::new();
    for name in names {
        let Some(j) = m.column_index(name) else {
            bail!("feature `{name}` of the saved forest is not in the input");
        };
        columns.push(m.column(j).to_vec());
        meta.push(m.meta()[j].clone());
    }
    let mut sub = FeatureMatrix::new(columns, meta)?.with_labels(m.labels()?.to_vec())?;
    if let Some(w) = m.weights() {
        sub = sub.with_weights(w.to_vec())?;
    }
    Ok(sub)
}

/// Cross-validates the three model specs on one shared fold plan, in the
/// order selected forest, full forest, logit.
pub fn compute(ctx: &Context, prep: &Prepared, fixed: Option<&FixedFeatures>) -> Result<Vec<CvResult>> {
    let cfg = &ctx.cfg;
    let data = &prep.matrix;
    let plan = kfold_split(
        data.n_rows(),
        cfg.evaluation.folds,
        Some(prep.labels()),
        cfg.evaluation.stratified,
        ctx.seed,
    )?;
    let fuzzy = match fixed {
        Some(f) => {
            warn!(
                "reusing {} features from a saved forest: selection is not re-run inside the folds",
                f.names.len()
            );
            let sub = column_subset(data, &f.names)?;
            let spec = ModelSpec::FullForest {
                n_trees: cfg.fuzzy.select_trees,
                params: cfg.tree_params(),
            };
            let mut r = cross_validate(&spec, &sub, &plan, ctx.seed)?;
            r.model = "fuzzy_forest".into();
            // Report fold features as columns of the full input.
            for fold in &mut r.folds {
                for c in &mut fold.features {
                    *c = data.column_index(sub.name(*c)).unwrap_or(*c);
                }
            }
            r
        }
        None => {
            let spec = ModelSpec::FuzzyTopK {
                wgcna: cfg.wgcna_config(),
                fuzzy: cfg.fuzzy_config(ctx.seed),
            };
            cross_validate(&spec, data, &plan, ctx.seed)?
        }
    };
    let full = ModelSpec::FullForest {
        n_trees: cfg.evaluation.forest_trees,
        params: cfg.tree_params(),
    };
    let logit = ModelSpec::Logit(cfg.logit_options());
    Ok(vec![
        fuzzy,
        cross_validate(&full, data, &plan, ctx.seed)?,
        cross_validate(&logit, data, &plan, ctx.seed)?,
    ])
}

/// `auc.csv` (one row per model, one column per fold, then mean and sd),
/// `roc.csv` (best-fold and pooled curves), `roc.svg` and
/// `evaluation.json` with per-fold detail.
pub fn write(ctx: &Context, header: &Header, prep: &Prepared, results: &[CvResult]) -> Result<()> {
    let k = results.first().map_or(0, |r| r.folds.len());
    let mut columns = vec!["model".to_string()];
    columns.extend((1..=k).map(|f| format!("fold_{f}")));
    columns.extend(["mean".to_string(), "sd".to_string()]);
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = vec![r.model.clone()];
            row.extend(r.folds.iter().map(|f| num(f.auc)));
            row.extend([num(r.mean_auc), num(r.sd_auc)]);
            row
        })
        .collect();
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    ctx.out.csv("auc.csv", header, &cols, &rows)?;

    let mut roc_rows = Vec::new();
    for r in results {
        for (curve, roc) in [("best_fold", r.best_roc()), ("pooled", &r.pooled_roc)] {
            for &(fpr, tpr) in &roc.points {
                roc_rows.push(vec![r.model.clone(), curve.to_string(), num(fpr), num(tpr)]);
            }
        }
    }
    ctx.out
        .csv("roc.csv", header, &["model", "curve", "fpr", "tpr"], &roc_rows)?;

    let curves: Vec<(&str, _)> = results.iter().map(|r| (r.model.as_str(), r.best_roc())).collect();
    ctx.out.svg("roc.svg", header, &svg::roc_plot(&curves))?;

    let m = &prep.matrix;
    let detail: Vec<_> = results
        .iter()
        .map(|r| {
            json!({
                "model": r.model,
                "mean_auc": r.mean_auc,
                "sd_auc": r.sd_auc,
                "best_fold": r.best_fold + 1,
                "pooled_auc": r.pooled_roc.auc,
                "folds": r.folds.iter().map(|f| json!({
                    "fold": f.fold + 1,
                    "auc": f.auc,
                    "n_train": f.n_train,
                    "n_test": f.n_test,
                    "features": f.features.iter().map(|&c| m.name(c)).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    ctx.out.json("evaluation.json", header, "models", &detail)?;
    Ok(())
}

pub fn print_table(results: &[CvResult]) {
    println!("{:<14} {:>8} {:>8} {:>10}", "model", "mean", "sd", "best fold");
    for r in results {
        println!(
            "{:<14} {:>8.4} {:>8.4} {:>10.4}",
            r.model,
            r.mean_auc,
            r.sd_auc,
            r.folds[r.best_fold].auc
        );
    }
}

pub fn run(ctx: &Context, forest: Option<&Path>) -> Result<()> {
    let prep = ctx.prepared()?;
    let fixed = forest.map(load_forest_features).transpose()?;
    let results = compute(ctx, &prep, fixed.as_ref())?;
    let mut header = ctx.header("evaluate")?;
    if let Some(p) = forest {
        header = header.with("forest", p.display().to_string());
    }
    write(ctx, &header, &prep, &results)?;
    print_table(&results);
    Ok(())
}
