//! The three-stage selection pipeline: per-module RFE-RF screening,
//! aggregate RFE-RF selection and the final forest.

pub mod pipeline;
pub mod rfe;

pub use pipeline::{
    run_pipeline, run_with_modules, screen_modules, select_features, FuzzyConfig, FuzzyResult, ModuleScreen,
    ModuleSummary, RankedFeature, Screening, Selection,
};
pub use rfe::{next_survivor_count, rfe_rf, RfeRound, RfeTrace};
