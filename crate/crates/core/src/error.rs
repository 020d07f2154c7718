use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{column}` is entirely missing")]
    ColumnAllMissing { column: String },
    #[error("column `{column}` has {observed} observed values, donor pool needs {required}")]
    DonorPoolUnsatisfiable {
        column: String,
        observed: usize,
        required: usize,
    },
    #[error("missing cell in column `{column}` at row {row}")]
    MissingCell { column: String, row: usize },
    #[error("column `{column}` row {row}: `{value}` is not numeric")]
    NotNumeric {
        column: String,
        row: usize,
        value: String,
    },
    #[error("label column `{column}` has {levels} levels, expected a binary outcome")]
    NotBinary { column: String, levels: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("data has no labels")]
    MissingLabels,
    #[error("empty feature subset")]
    EmptyFeatureSet,
    #[error("row lacks a value for feature {0}")]
    MissingFeature(usize),
    #[error("no features survived module screening; every feature is grey")]
    NoSurvivors,
    #[error("no row is out-of-bag for any tree")]
    NoOutOfBagRows,
    #[error("invalid dissimilarity matrix: {0}")]
    InvalidDissimilarity(String),
    #[error("labels contain a single class")]
    SingleClass,
    #[error("fold {fold} has a single class in its held-out rows")]
    SingleClassFold { fold: usize },
    #[error("logistic regression did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
