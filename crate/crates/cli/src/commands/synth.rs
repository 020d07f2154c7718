use anyhow::Result;
use fuzzyforest::data::synth::{SURVEY_LABEL, SURVEY_WEIGHT};
use fuzzyforest::data::{generate_survey, generate_synthetic, read_csv, LoadOptions, RawTable};

use super::Context;
use crate::config::SynthKind;
use crate::output::{num, Header};
use crate::prepare::Truth;

pub struct Synthetic {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub truth: Truth,
    /// The same data as an in-memory table, missing cells as `None`.
    pub table: RawTable,
}

/// Generates the configured synthetic dataset. Label and weight columns
/// take the configured names, and the in-memory table is parsed from the
/// same CSV text that `write` puts on disk.
pub fn generate(ctx: &Context) -> Result<Synthetic> {
    let cfg = &ctx.cfg;
    let (columns, rows, truth) = match cfg.synth.kind {
        SynthKind::Blocks => {
            let mut sc = cfg.synth.blocks.clone();
            sc.seed = ctx.seed;
            let data = generate_synthetic(&sc)?;
            let m = &data.matrix;
            let labels = m.labels()?;
            let mut columns: Vec<String> = (0..m.n_cols()).map(|j| m.name(j).to_string()).collect();
            columns.push(cfg.label_column.clone());
            let rows: Vec<Vec<String>> = (0..m.n_rows())
                .map(|r| {
                    let mut row: Vec<String> = m.row(r).into_iter().map(num).collect();
                    row.push(labels[r].to_string());
                    row
                })
                .collect();
            let truth = Truth {
                kind: "blocks".into(),
                signal_variables: data.informative.iter().map(|&j| m.name(j).to_string()).collect(),
                blocks: (0..m.n_cols()).map(|j| (m.name(j).to_string(), data.block_of[j])).collect(),
                masked_cells: 0,
            };
            (columns, rows, truth)
        }
        SynthKind::Survey => {
            let mut sc = cfg.synth.survey.clone();
            sc.seed = ctx.seed;
            let data = generate_survey(&sc)?;
            let t = &data.table;
            let weight_name = cfg.weight_column.clone().unwrap_or_else(|| SURVEY_WEIGHT.to_string());
            let columns: Vec<String> = t
                .names()
                .iter()
                .map(|n| match n.as_str() {
                    SURVEY_LABEL => cfg.label_column.clone(),
                    SURVEY_WEIGHT => weight_name.clone(),
                    _ => n.clone(),
                })
                .collect();
            let missing = cfg.missing_sentinels.first().cloned().unwrap_or_default();
            let rows: Vec<Vec<String>> = (0..t.n_rows())
                .map(|r| {
                    (0..t.n_cols())
                        .map(|c| t.cell(r, c).map_or_else(|| missing.clone(), str::to_string))
                        .collect()
                })
                .collect();
            let signal_variables = t
                .names()
                .iter()
                .zip(&data.block_of)
                .filter(|(_, &b)| b == 1)
                .map(|(n, _)| n.clone())
                .collect();
            let truth = Truth {
                kind: "survey".into(),
                signal_variables,
                blocks: t.names().iter().cloned().zip(data.block_of.iter().copied()).collect(),
                masked_cells: data.masked_cells,
            };
            (columns, rows, truth)
        }
    };
    let table = to_table(&columns, &rows, &cfg.missing_sentinels)?;
    Ok(Synthetic {
        columns,
        rows,
        truth,
        table,
    })
}

fn to_table(columns: &[String], rows: &[Vec<String>], sentinels: &[String]) -> Result<RawTable> {
    let mut text = csv::Writer::from_writer(Vec::new());
    text.write_record(columns)?;
    for row in rows {
        text.write_record(row)?;
    }
    let bytes = text.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    let options = LoadOptions {
        sentinels: sentinels.to_vec(),
        ..LoadOptions::default()
    };
    Ok(read_csv(bytes.as_slice(), &options)?)
}

pub fn write(ctx: &Context, header: &Header, data: &Synthetic) -> Result<()> {
    let cols: Vec<&str> = data.columns.iter().map(String::as_str).collect();
    ctx.out.csv("raw.csv", header, &cols, &data.rows)?;
    ctx.out.json("truth.json", header, "truth", &data.truth)?;
    Ok(())
}

pub fn run(ctx: &Context) -> Result<()> {
    let data = generate(ctx)?;
    write(ctx, &ctx.header("synth")?, &data)?;
    println!(
        "wrote {} rows x {} columns ({} masked cells) to {}",
        data.rows.len(),
        data.columns.len(),
        data.truth.masked_cells,
        ctx.out.path("raw.csv").display()
    );
    Ok(())
}
