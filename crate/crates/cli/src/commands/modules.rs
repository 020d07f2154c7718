use anyhow::Result;
use fuzzyforest::fuzzy::ModuleSummary;
use fuzzyforest::wgcna::{find_modules, ModuleResult, SquareMatrix};
use fuzzyforest::FeatureMatrix;

use super::Context;
use crate::output::{num, Header};
use crate::prepare::Prepared;
use crate::svg;

pub fn compute(ctx: &Context, prep: &Prepared) -> Result<ModuleResult> {
    Ok(find_modules(&prep.matrix, &ctx.cfg.wgcna_config())?)
}

pub fn summary_of(found: &ModuleResult) -> ModuleSummary {
    ModuleSummary {
        beta: found.beta,
        beta_selection: found.beta_selection.clone(),
        cut_height: found.cut_height,
        dendrogram: found.dendrogram.clone(),
        partition: found.partition.clone(),
    }
}

fn square_csv(ctx: &Context, name: &str, header: &Header, m: &FeatureMatrix, sq: &SquareMatrix) -> Result<()> {
    let mut columns = vec!["feature"];
    columns.extend((0..m.n_cols()).map(|j| m.name(j)));
    let rows: Vec<Vec<String>> = (0..sq.dim())
        .map(|i| {
            let mut row = vec![m.name(i).to_string()];
            row.extend(sq.row(i).iter().map(|&v| num(v)));
            row
        })
        .collect();
    ctx.out.csv(name, header, &columns, &rows)?;
    Ok(())
}

/// Membership CSV, dendrogram SVG and, if configured, the network matrices.
/// The chosen power and cut height go into every header.
pub fn write(ctx: &Context, header: &Header, prep: &Prepared, found: &ModuleResult) -> Result<()> {
    let header = header
        .with("beta", found.beta)
        .with(
            "beta_fallback",
            found.beta_selection.as_ref().is_some_and(|s| s.fallback),
        )
        .with("cut_height", found.cut_height);
    let m = &prep.matrix;
    let part = &found.partition;
    let rows: Vec<Vec<String>> = (0..m.n_cols())
        .map(|j| {
            vec![
                m.name(j).to_string(),
                part.color_of(j).to_string(),
                part.assignment[j].to_string(),
            ]
        })
        .collect();
    ctx.out
        .csv("modules.csv", &header, &["feature", "module_color", "module_id"], &rows)?;
    ctx.out.svg(
        "dendrogram.svg",
        &header,
        &svg::dendrogram(&found.dendrogram, part, found.cut_height),
    )?;
    if ctx.cfg.wgcna.write_matrices {
        square_csv(ctx, "adjacency.csv", &header, m, &found.adjacency.matrix)?;
        square_csv(ctx, "tom.csv", &header, m, &found.tom.0)?;
    }
    Ok(())
}

pub fn summary(found: &ModuleResult) -> String {
    let part = &found.partition;
    let sizes = part.sizes();
    let fallback = found.beta_selection.as_ref().is_some_and(|s| s.fallback);
    format!(
        "beta {}{}, cut height {:.4}: {} modules (sizes {:?}), {} grey features",
        found.beta,
        if fallback { " (fallback)" } else { "" },
        found.cut_height,
        part.n_modules(),
        &sizes[1..],
        sizes[0]
    )
}

pub fn run(ctx: &Context) -> Result<()> {
    let prep = ctx.prepared()?;
    let found = compute(ctx, &prep)?;
    write(ctx, &ctx.header("modules")?, &prep, &found)?;
    println!("{}", summary(&found));
    Ok(())
}
