//! Feature selection for high-dimensional, correlated data.
//!
//! Correlated features are grouped into modules with a weighted
//! correlation network ([`wgcna`]); recursive feature elimination with
//! random forests ([`forest`]) screens each module separately and then
//! selects a final ranked set across the survivors ([`fuzzy`]). The
//! [`data`] module covers survey ingestion (imputation and one-hot
//! encoding) and [`eval`] the cross-validated comparison against a full
//! forest and a ridge logistic baseline.

pub mod data;
pub mod error;
pub mod eval;
pub mod forest;
pub mod fuzzy;
pub mod rng;
pub mod wgcna;

mod linalg;

pub use data::{FeatureMatrix, RawTable};
pub use error::{Error, Result};
pub use forest::{Forest, TreeParams, VimTable};
pub use fuzzy::{FuzzyConfig, FuzzyResult, RfeTrace};
pub use wgcna::{ModulePartition, WgcnaConfig};
