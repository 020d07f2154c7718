use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What an encoded column stands for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Indicator for one level of a categorical source variable.
    Level(String),
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    pub source: String,
    pub category: Category,
}

impl ColumnMeta {
    pub fn numeric(name: impl Into<String>) -> Self {
        let name = name.into();
        ColumnMeta {
            source: name.clone(),
            name,
            category: Category::Numeric,
        }
    }

    pub fn indicator(source: &str, level: &str) -> Self {
        ColumnMeta {
            name: format!("{source}={level}"),
            source: source.to_string(),
            category: Category::Level(level.to_string()),
        }
    }
}

/// Dense `n x p` design matrix, stored column-major, with optional binary
/// labels and nonnegative observation weights.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    columns: Vec<Vec<f64>>,
    meta: Vec<ColumnMeta>,
    n_rows: usize,
    labels: Option<Vec<u8>>,
    weights: Option<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(columns: Vec<Vec<f64>>, meta: Vec<ColumnMeta>) -> Result<Self> {
        if columns.len() != meta.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns but {} metadata entries",
                columns.len(),
                meta.len()
            )));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        for (col, m) in columns.iter().zip(&meta) {
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch(format!(
                    "column `{}` has {} rows, expected {n_rows}",
                    m.name,
                    col.len()
                )));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::MissingCell {
                    column: m.name.clone(),
                    row,
                });
            }
        }
        Ok(FeatureMatrix {
            columns,
            meta,
            n_rows,
            labels: None,
            weights: None,
        })
    }

    /// Numeric columns named `x0`, `x1`, ...
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let meta = (0..columns.len())
            .map(|j| ColumnMeta::numeric(format!("x{j}")))
            .collect();
        FeatureMatrix::new(columns, meta)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for row in rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for (c, &v) in columns.iter_mut().zip(row) {
                c.push(v);
            }
        }
        FeatureMatrix::from_columns(columns)
    }

    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != self.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} rows",
                labels.len(),
                self.n_rows
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} rows",
                weights.len(),
                self.n_rows
            )));
        }
        validate_weights(&weights)?;
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    pub fn meta(&self) -> &[ColumnMeta] {
        &self.meta
    }

    pub fn name(&self, j: usize) -> &str {
        &self.meta[j].name
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.meta.iter().position(|m| m.name == name)
    }

    pub fn labels(&self) -> Result<&[u8]> {
        self.labels.as_deref().ok_or(Error::MissingLabels)
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Copies the given rows (in order, duplicates allowed) into a new matrix.
    pub fn subset_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            meta: self.meta.clone(),
            n_rows: rows.len(),
            labels: self
                .labels
                .as_ref()
                .map(|l| rows.iter().map(|&r| l[r]).collect()),
            weights: self
                .weights
                .as_ref()
                .map(|w| rows.iter().map(|&r| w[r]).collect()),
        }
    }

    /// Replaces the labels; used by relabeling and permutation experiments.
    pub fn map_labels(&self, f: impl Fn(usize, u8) -> u8) -> Result<FeatureMatrix> {
        let labels = self.labels()?.iter().enumerate().map(|(i, &l)| f(i, l)).collect();
        self.clone().with_labels(labels)
    }
}

pub(crate) fn validate_weights(weights: &[f64]) -> Result<()> {
    if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("weight {bad} is not a nonnegative number")));
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(Error::InvalidWeights("all weights are zero".into()));
    }
    Ok(())
}

/// Maps a raw outcome column onto 0/1.
///
/// Columns whose values are all `0`/`1` keep that coding; otherwise the
/// lexicographically smaller level becomes 0. Returns the labels and the
/// level names indexed by class.
pub fn binary_labels(column: &str, cells: &[Option<String>]) -> Result<(Vec<u8>, Vec<String>)> {
    let mut levels: Vec<&str> = Vec::new();
    for (row, cell) in cells.iter().enumerate() {
        let value = cell.as_deref().ok_or_else(|| Error::MissingCell {
            column: column.to_string(),
            row,
        })?;
        if !levels.contains(&value) {
            levels.push(value);
        }
    }
    if levels.len() > 2 {
        return Err(Error::NotBinary {
            column: column.to_string(),
            levels: levels.len(),
        });
    }
    let names: Vec<String> = if levels.iter().all(|l| *l == "0" || *l == "1") {
        vec!["0".to_string(), "1".to_string()]
    } else {
        levels.sort_unstable();
        if levels.len() == 1 {
            // Single-class data: the lone level is class 0.
            levels.push("");
        }
        levels.iter().map(|s| s.to_string()).collect()
    };
    let labels = cells
        .iter()
        .map(|c| u8::from(c.as_deref() == Some(names[1].as_str())))
        .collect();
    Ok((labels, names))
}

pub fn parse_weights(column: &str, cells: &[Option<String>]) -> Result<Vec<f64>> {
    let weights = cells
        .iter()
        .enumerate()
        .map(|(row, cell)| {
            let text = cell.as_deref().ok_or_else(|| Error::MissingCell {
                column: column.to_string(),
                row,
            })?;
            text.trim().parse::<f64>().map_err(|_| Error::NotNumeric {
                column: column.to_string(),
                row,
                value: text.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    validate_weights(&weights)?;
    Ok(weights)
}
