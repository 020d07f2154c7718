use std::collections::BTreeMap;

use anyhow::{bail, Result};
use fuzzyforest::data::ColumnKind;
use serde::Serialize;

use super::Context;
use crate::output::{num, Header};
use crate::prepare::Prepared;

/// Level name used for missing cells.
pub const MISSING_LEVEL: &str = "(missing)";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosstabRow {
    pub variable: String,
    pub level: String,
    pub outcome: String,
    /// Row count, or summed weights when weighted.
    pub count: f64,
    /// Share of this level falling in `outcome`.
    pub proportion: f64,
}

/// Outcome breakdown per level of each variable, on the raw (unimputed)
/// answers. Levels sort lexicographically; missing cells form their own
/// level last.
pub fn compute(ctx: &Context, prep: &Prepared) -> Result<Vec<CrosstabRow>> {
    let cfg = &ctx.cfg.crosstab;
    let raw = &prep.raw;
    let weights = if cfg.weighted {
        match prep.matrix.weights() {
            Some(w) => Some(w),
            None => bail!("weighted crosstab needs a weight column"),
        }
    } else {
        None
    };
    let variables: Vec<String> = if cfg.variables.is_empty() {
        (0..raw.n_cols())
            .filter(|&j| raw.kinds()[j] == ColumnKind::Categorical)
            .map(|j| raw.names()[j].clone())
            .collect()
    } else {
        cfg.variables.clone()
    };
    let labels = prep.labels();
    let mut rows = Vec::new();
    for var in &variables {
        let j = raw.column_index(var)?;
        let mut table: BTreeMap<(bool, &str), [f64; 2]> = BTreeMap::new();
        for (r, cell) in raw.column(j).iter().enumerate() {
            let key = match cell {
                Some(v) => (false, v.as_str()),
                None => (true, MISSING_LEVEL),
            };
            table.entry(key).or_insert([0.0; 2])[usize::from(labels[r])] += weights.map_or(1.0, |w| w[r]);
        }
        for ((_, level), counts) in table {
            let total = counts[0] + counts[1];
            for (class, &count) in counts.iter().enumerate() {
                rows.push(CrosstabRow {
                    variable: var.clone(),
                    level: level.to_string(),
                    outcome: prep.label_levels[class].clone(),
                    count,
                    proportion: if total > 0.0 { count / total } else { 0.0 },
                });
            }
        }
    }
    Ok(rows)
}

pub fn write(ctx: &Context, header: &Header, rows: &[CrosstabRow]) -> Result<()> {
    let header = header.with("weighted", ctx.cfg.crosstab.weighted);
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.variable.clone(),
                r.level.clone(),
                r.outcome.clone(),
                num(r.count),
                num(r.proportion),
            ]
        })
        .collect();
    ctx.out.csv(
        "crosstab.csv",
        &header,
        &["variable", "level", "outcome", "count", "proportion"],
        &records,
    )?;
    Ok(())
}

pub fn run(ctx: &Context) -> Result<()> {
    let prep = ctx.prepared()?;
    let rows = compute(ctx, &prep)?;
    write(ctx, &ctx.header("crosstab")?, &rows)?;
    for r in &rows {
        println!(
            "{:<16} {:<16} {:<8} {:>12.3} {:>7.3}",
            r.variable, r.level, r.outcome, r.count, r.proportion
        );
    }
    Ok(())
}
