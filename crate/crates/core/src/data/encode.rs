use crate::data::matrix::{Category, ColumnMeta, FeatureMatrix};
use crate::data::table::{ColumnKind, RawTable};
use crate::error::{Error, Result};

/// Expands every categorical column into one 0/1 indicator per observed
/// level (first-appearance order) and passes numeric columns through.
pub fn one_hot_encode(table: &RawTable) -> Result<FeatureMatrix> {
    let n = table.n_rows();
    let mut columns = Vec::new();
    let mut meta = Vec::new();
    for (j, name) in table.names().iter().enumerate() {
        let cells = table.column(j);
        if let Some(row) = cells.iter().position(Option::is_none) {
            return Err(Error::MissingCell {
                column: name.clone(),
                row,
            });
        }
        let cells = cells.iter().map(|c| c.as_deref().unwrap_or_default());
        match table.kinds()[j] {
            ColumnKind::Numeric => {
                let values = cells
                    .enumerate()
                    .map(|(row, text)| {
                        text.trim().parse::<f64>().map_err(|_| Error::NotNumeric {
                            column: name.clone(),
                            row,
                            value: text.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                columns.push(values);
                meta.push(ColumnMeta::numeric(name.as_str()));
            }
            ColumnKind::Categorical => {
                let mut levels: Vec<&str> = Vec::new();
                let mut codes = Vec::with_capacity(n);
                for text in cells {
                    let code = match levels.iter().position(|l| *l == text) {
                        Some(code) => code,
                        None => {
                            levels.push(text);
                            levels.len() - 1
                        }
                    };
                    codes.push(code);
                }
                for (code, level) in levels.iter().enumerate() {
                    columns.push(codes.iter().map(|&c| f64::from(u8::from(c == code))).collect());
                    meta.push(ColumnMeta::indicator(name, level));
                }
            }
        }
    }
    FeatureMatrix::new(columns, meta)
}

/// Collapses indicator groups back to their source variables by argmax.
/// Numeric columns are rendered with `f64`'s shortest round-trip format.
pub fn decode_indicators(matrix: &FeatureMatrix) -> Result<RawTable> {
    let n = matrix.n_rows();
    let mut names: Vec<String> = Vec::new();
    let mut kinds = Vec::new();
    let mut columns: Vec<Vec<Option<String>>> = Vec::new();
    let mut j = 0;
    while j < matrix.n_cols() {
        let meta = &matrix.meta()[j];
        match &meta.category {
            Category::Numeric => {
                names.push(meta.source.clone());
                kinds.push(ColumnKind::Numeric);
                columns.push(matrix.column(j).iter().map(|v| Some(v.to_string())).collect());
                j += 1;
            }
            Category::Level(_) => {
                let start = j;
                while j < matrix.n_cols()
                    && matrix.meta()[j].source == meta.source
                    && matches!(matrix.meta()[j].category, Category::Level(_))
                {
                    j += 1;
                }
                let group = start..j;
                let decoded = (0..n)
                    .map(|r| {
                        let best = group
                            .clone()
                            .max_by(|&a, &b| {
                                matrix.value(r, a).total_cmp(&matrix.value(r, b)).then(b.cmp(&a))
                            })
                            .expect("nonempty group");
                        match &matrix.meta()[best].category {
                            Category::Level(level) => Some(level.clone()),
                            Category::Numeric => unreachable!(),
                        }
                    })
                    .collect();
                names.push(meta.source.clone());
                kinds.push(ColumnKind::Categorical);
                columns.push(decoded);
            }
        }
    }
    RawTable::new(names, kinds, columns)
}
