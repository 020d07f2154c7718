use anyhow::Result;
use serde_json::json;

use super::{crosstab, evaluate, ingest, modules, select, synth, Context};
use crate::prepare::{load_table, load_truth, prepare, recovered};

/// Every stage in sequence, sharing intermediate results. Without an input
/// file the configured synthetic dataset is generated and written first.
pub fn run(ctx: &Context) -> Result<()> {
    let header = ctx.header("report")?;
    let (table, truth) = match &ctx.cfg.input {
        Some(path) => {
            let truth = ctx.cfg.truth.as_deref().map(load_truth).transpose()?;
            (load_table(&ctx.cfg, path)?, truth)
        }
        None => {
            let data = synth::generate(ctx)?;
            synth::write(ctx, &header, &data)?;
            (data.table, Some(data.truth))
        }
    };

    let prep = prepare(table, &ctx.cfg, ctx.seed)?;
    ingest::write(ctx, &header, &prep)?;
    println!("{}", ingest::summary(&prep));

    let found = modules::compute(ctx, &prep)?;
    modules::write(ctx, &header, &prep, &found)?;
    println!("{}", modules::summary(&found));

    let result = select::compute(ctx, &prep, modules::summary_of(&found))?;
    select::write(ctx, &header, &result)?;
    select::print_ranking(&result);
    if let Some(t) = &truth {
        println!("{}", select::recovery_line(t, &prep, &result));
    }

    let cv = evaluate::compute(ctx, &prep, None)?;
    evaluate::write(ctx, &header, &prep, &cv)?;
    evaluate::print_table(&cv);

    let tab = crosstab::compute(ctx, &prep)?;
    crosstab::write(ctx, &header, &tab)?;

    let summary = json!({
        "rows": prep.matrix.n_rows(),
        "encoded_features": prep.matrix.n_cols(),
        "missing_fraction": prep.report.overall,
        "beta": found.beta,
        "cut_height": found.cut_height,
        "modules": found.partition.n_modules(),
        "grey_features": found.partition.sizes()[0],
        "top_features": result.selection.ranked.iter().map(|r| &r.name).collect::<Vec<_>>(),
        "recovered_signal": truth.as_ref().map(|t| recovered(t, &prep.matrix, &result.selected_columns())),
        "auc": cv.iter().map(|r| json!({
            "model": r.model,
            "mean": r.mean_auc,
            "sd": r.sd_auc,
            "best_fold": r.folds[r.best_fold].auc,
        })).collect::<Vec<_>>(),
    });
    ctx.out.json("summary.json", &header, "summary", &summary)?;
    Ok(())
}
