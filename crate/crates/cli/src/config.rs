//! Run configuration: a TOML file merged with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fuzzyforest::data::{SurveyConfig, SynthConfig};
use fuzzyforest::eval::LogitOptions;
use fuzzyforest::forest::TreeParams;
use fuzzyforest::fuzzy::FuzzyConfig;
use fuzzyforest::wgcna::{default_beta_candidates, BetaSetting, WgcnaConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub input: Option<PathBuf>,
    /// Ground-truth JSON written by `synth`, used to score recovery.
    pub truth: Option<PathBuf>,
    pub label_column: String,
    pub weight_column: Option<String>,
    pub missing_sentinels: Vec<String>,
    pub impute: ImputeSection,
    pub wgcna: WgcnaSection,
    pub fuzzy: FuzzySection,
    pub evaluation: EvalSection,
    pub crosstab: CrosstabSection,
    pub synth: SynthSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            input: None,
            truth: None,
            label_column: "label".into(),
            weight_column: None,
            missing_sentinels: vec![String::new(), "NA".into()],
            impute: ImputeSection::default(),
            wgcna: WgcnaSection::default(),
            fuzzy: FuzzySection::default(),
            evaluation: EvalSection::default(),
            crosstab: CrosstabSection::default(),
            synth: SynthSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImputeSection {
    pub donor_pool_size: usize,
}

impl Default for ImputeSection {
    fn default() -> Self {
        ImputeSection { donor_pool_size: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WgcnaSection {
    /// Fixed soft-threshold power; unset picks one from `beta_candidates`.
    pub beta: Option<f64>,
    pub beta_candidates: Vec<f64>,
    pub cut_height: Option<f64>,
    pub min_module_size: usize,
    /// Also write the adjacency and TOM matrices.
    pub write_matrices: bool,
}

impl Default for WgcnaSection {
    fn default() -> Self {
        WgcnaSection {
            beta: None,
            beta_candidates: default_beta_candidates(),
            cut_height: None,
            min_module_size: 5,
            write_matrices: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzySection {
    pub drop_fraction: f64,
    pub keep_fraction: f64,
    pub final_k: usize,
    pub screen_trees: usize,
    pub select_trees: usize,
    pub mtry: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub screen_grey: bool,
}

impl Default for FuzzySection {
    fn default() -> Self {
        let core = FuzzyConfig::default();
        FuzzySection {
            drop_fraction: core.drop_fraction,
            keep_fraction: core.keep_fraction,
            final_k: core.final_k,
            screen_trees: core.screen_trees,
            select_trees: core.select_trees,
            mtry: None,
            max_depth: None,
            min_leaf: 1,
            screen_grey: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub folds: usize,
    pub stratified: bool,
    pub lambda: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    /// Trees in the all-features comparison forest.
    pub forest_trees: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        let logit = LogitOptions::default();
        EvalSection {
            folds: 10,
            stratified: true,
            lambda: logit.lambda,
            tolerance: logit.tolerance,
            max_iter: logit.max_iter,
            forest_trees: 500,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrosstabSection {
    /// Variables to break down; empty means every categorical feature.
    pub variables: Vec<String>,
    pub weighted: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    /// Continuous features in correlated blocks with planted signal.
    #[default]
    Blocks,
    /// Categorical survey answers with missing cells and weights.
    Survey,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub kind: SynthKind,
    pub blocks: SynthConfig,
    pub survey: SurveyConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn seed(&self) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("a seed is required: pass --seed or set `seed` in the config file"),
        }
    }

    pub fn input(&self) -> Result<&Path> {
        match &self.input {
            Some(p) => Ok(p),
            None => bail!("no input file: pass --input or set `input` in the config file"),
        }
    }

    pub fn wgcna_config(&self) -> WgcnaConfig {
        let w = &self.wgcna;
        WgcnaConfig {
            beta: match w.beta {
                Some(b) => BetaSetting::Fixed(b),
                None => BetaSetting::Auto(w.beta_candidates.clone()),
            },
            cut_height: w.cut_height,
            min_module_size: w.min_module_size,
        }
    }

    pub fn fuzzy_config(&self, seed: u64) -> FuzzyConfig {
        let f = &self.fuzzy;
        FuzzyConfig {
            drop_fraction: f.drop_fraction,
            keep_fraction: f.keep_fraction,
            final_k: f.final_k,
            screen_trees: f.screen_trees,
            select_trees: f.select_trees,
            tree_params: self.tree_params(),
            screen_grey: f.screen_grey,
            seed,
        }
    }

    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            mtry: self.fuzzy.mtry,
            max_depth: self.fuzzy.max_depth,
            min_leaf: self.fuzzy.min_leaf,
            ..TreeParams::default()
        }
    }

    pub fn logit_options(&self) -> LogitOptions {
        LogitOptions {
            lambda: self.evaluation.lambda,
            tolerance: self.evaluation.tolerance,
            max_iter: self.evaluation.max_iter,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn sections_parse() {
        let cfg: RunConfig = toml::from_str(
            r#"
            seed = 9
            label_column = "vote"
            [wgcna]
            beta = 4.0
            [fuzzy]
            final_k = 7
            [synth]
            kind = "survey"
            [synth.survey]
            n_rows = 50
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.wgcna.beta, Some(4.0));
        assert_eq!(cfg.fuzzy.final_k, 7);
        assert_eq!(cfg.synth.kind, SynthKind::Survey);
        assert_eq!(cfg.synth.survey.n_rows, 50);
        assert_eq!(cfg.synth.survey.level_counts, SurveyConfig::default().level_counts);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 3").is_err());
    }

    #[test]
    fn missing_seed_is_an_error() {
        assert!(RunConfig::default().seed().is_err());
    }
}
