//! Survey-table ingestion: CSV loading, missingness, PMM imputation,
//! one-hot encoding and synthetic data generation.

pub mod encode;
pub mod impute;
pub mod matrix;
pub mod synth;
pub mod table;

pub use encode::{decode_indicators, one_hot_encode};
pub use impute::{impute_pmm, CovariatePolicy, ImputeConfig};
pub use matrix::{binary_labels, parse_weights, Category, ColumnMeta, FeatureMatrix};
pub use synth::{generate_survey, generate_synthetic, SurveyConfig, SurveyData, SynthConfig, SyntheticData};
pub use table::{load_csv, missingness_report, read_csv, ColumnKind, LoadOptions, MissingnessReport, RawTable};
