use anyhow::Result;
use fuzzyforest::fuzzy::{run_with_modules, ModuleSummary};
use fuzzyforest::FuzzyResult;
use log::warn;
use serde_json::json;

use super::{modules, Context};
use crate::output::{num, Header};
use crate::prepare::{load_truth, recovered, Prepared, Truth};

pub fn compute(ctx: &Context, prep: &Prepared, modules: ModuleSummary) -> Result<FuzzyResult> {
    let p = prep.matrix.n_cols();
    if ctx.cfg.fuzzy.final_k > p {
        warn!(
            "final_k = {} exceeds the {p} encoded features; all features will be ranked",
            ctx.cfg.fuzzy.final_k
        );
    }
    Ok(run_with_modules(&prep.matrix, modules, &ctx.cfg.fuzzy_config(ctx.seed))?)
}

/// `fuzzy_result.json` (the audit trail without the forest), the ranked
/// `top_features.csv` and the final forest as `forest.json`.
pub fn write(ctx: &Context, header: &Header, result: &FuzzyResult) -> Result<()> {
    let header = header
        .with("beta", result.modules.beta)
        .with("cut_height", result.modules.cut_height);
    let audit = json!({
        "config": result.config,
        "modules": result.modules,
        "screening": result.screening,
        "selection": result.selection,
    });
    ctx.out.json("fuzzy_result.json", &header, "result", &audit)?;

    let part = &result.modules.partition;
    let rows: Vec<Vec<String>> = result
        .selection
        .ranked
        .iter()
        .map(|r| {
            vec![
                r.rank.to_string(),
                r.name.clone(),
                num(r.vim),
                part.color_of(r.column).to_string(),
            ]
        })
        .collect();
    ctx.out
        .csv("top_features.csv", &header, &["rank", "feature", "vim", "module_color"], &rows)?;

    let forest: serde_json::Value = serde_json::from_str(&result.final_forest.to_json()?)?;
    ctx.out.json_with_header("forest.json", &header, forest)?;
    Ok(())
}

pub fn recovery_line(truth: &Truth, prep: &Prepared, result: &FuzzyResult) -> String {
    let got = recovered(truth, &prep.matrix, &result.selected_columns());
    format!(
        "recovered {} of {} signal variables in the top {}: {:?}",
        got.len(),
        truth.signal_variables.len(),
        result.selection.ranked.len(),
        got
    )
}

pub fn print_ranking(result: &FuzzyResult) {
    let part = &result.modules.partition;
    for r in &result.selection.ranked {
        println!("{:>3}  {:<30} {:>10.5}  {}", r.rank, r.name, r.vim, part.color_of(r.column));
    }
}

pub fn run(ctx: &Context) -> Result<()> {
    let prep = ctx.prepared()?;
    let found = modules::compute(ctx, &prep)?;
    let result = compute(ctx, &prep, modules::summary_of(&found))?;
    write(ctx, &ctx.header("select")?, &result)?;
    print_ranking(&result);
    if let Some(path) = &ctx.cfg.truth {
        println!("{}", recovery_line(&load_truth(path)?, &prep, &result));
    }
    Ok(())
}
