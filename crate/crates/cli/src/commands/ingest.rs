use anyhow::Result;
use serde_json::json;

use super::Context;
use crate::output::{num, Header};
use crate::prepare::Prepared;

/// Writes `encoded.csv`, `column_meta.json` and `missingness.json`.
pub fn write(ctx: &Context, header: &Header, prep: &Prepared) -> Result<()> {
    let m = &prep.matrix;
    let labels = prep.labels();
    let weights = m.weights();
    let mut columns: Vec<&str> = (0..m.n_cols()).map(|j| m.name(j)).collect();
    columns.push(&ctx.cfg.label_column);
    if let Some(w) = &ctx.cfg.weight_column {
        columns.push(w);
    }
    let rows: Vec<Vec<String>> = (0..m.n_rows())
        .map(|r| {
            let mut row: Vec<String> = m.row(r).into_iter().map(num).collect();
            row.push(labels[r].to_string());
            if let Some(w) = weights {
                row.push(num(w[r]));
            }
            row
        })
        .collect();
    ctx.out.csv("encoded.csv", header, &columns, &rows)?;

    let meta = json!({
        "columns": m.meta(),
        "label": { "column": ctx.cfg.label_column, "levels": prep.label_levels },
        "weight_column": ctx.cfg.weight_column,
    });
    ctx.out.json("column_meta.json", header, "meta", &meta)?;
    ctx.out.json("missingness.json", header, "missingness", &prep.report)?;
    Ok(())
}

pub fn summary(prep: &Prepared) -> String {
    let r = &prep.report;
    format!(
        "{} rows, {} variables -> {} encoded columns; missing cells: {} of {} ({:.2}%), all imputed",
        prep.raw.n_rows(),
        prep.raw.n_cols(),
        prep.matrix.n_cols(),
        r.missing_cells,
        r.total_cells,
        100.0 * r.overall
    )
}

pub fn run(ctx: &Context) -> Result<()> {
    let prep = ctx.prepared()?;
    write(ctx, &ctx.header("ingest")?, &prep)?;
    println!("{}", summary(&prep));
    Ok(())
}
