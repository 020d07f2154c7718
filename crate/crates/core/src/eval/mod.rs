//! Validation: stratified k-fold splits, ROC/AUC, a ridge logistic
//! baseline and the cross-validation harness comparing model specs.

pub mod cv;
pub mod folds;
pub mod logit;
pub mod roc;

pub use cv::{cross_validate, fit_model, CvResult, FittedModel, FoldOutcome, ModelSpec};
pub use folds::{kfold_split, FoldPlan};
pub use logit::{fit_logit, fit_logit_design, logit_gradient, logit_objective, Design, FitStatus, LogitModel, LogitOptions};
pub use roc::{roc_curve, RocCurve};
