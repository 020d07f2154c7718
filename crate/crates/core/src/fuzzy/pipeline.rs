use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::forest::{fit_forest, Forest, TreeParams};
use crate::fuzzy::rfe::{ceil_tolerant, rfe_rf, RfeTrace};
use crate::rng::{derive_seed, tag};
use crate::wgcna::{find_modules, BetaSelection, Dendrogram, ModulePartition, WgcnaConfig, GREY};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzyConfig {
    /// Share of features dropped per elimination round.
    pub drop_fraction: f64,
    /// Share of each module that survives screening.
    pub keep_fraction: f64,
    pub final_k: usize,
    pub screen_trees: usize,
    pub select_trees: usize,
    pub tree_params: TreeParams,
    /// Screen the grey module as one more module instead of dropping it.
    pub screen_grey: bool,
    pub seed: u64,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        FuzzyConfig {
            drop_fraction: 0.25,
            keep_fraction: 0.25,
            final_k: 20,
            screen_trees: 500,
            select_trees: 1000,
            tree_params: TreeParams::default(),
            screen_grey: false,
            seed: 0,
        }
    }
}

impl FuzzyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.drop_fraction > 0.0 && self.drop_fraction < 1.0) {
            return Err(Error::InvalidConfig("drop_fraction must be in (0, 1)".into()));
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return Err(Error::InvalidConfig("keep_fraction must be in (0, 1]".into()));
        }
        if self.final_k == 0 {
            return Err(Error::InvalidConfig("final_k must be at least 1".into()));
        }
        if self.screen_trees == 0 || self.select_trees == 0 {
            return Err(Error::InvalidConfig("tree counts must be at least 1".into()));
        }
        Ok(())
    }

    /// Screening survival target for a module of `size` features.
    pub fn module_target(&self, size: usize) -> usize {
        ceil_tolerant(self.keep_fraction * size as f64).max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleScreen {
    pub module: usize,
    pub color: String,
    pub size: usize,
    pub trace: RfeTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Screening {
    pub modules: Vec<ModuleScreen>,
    /// Union of module survivors, ascending.
    pub survivors: Vec<usize>,
}

/// Runs RFE-RF inside every non-grey module (and grey too when
/// `screen_grey` is set). Modules are independent and screened in
/// parallel, each with its own seed stream.
pub fn screen_modules(partition: &ModulePartition, data: &FeatureMatrix, config: &FuzzyConfig) -> Result<Screening> {
    config.validate()?;
    if partition.n_features() != data.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} features, data has {} columns",
            partition.n_features(),
            data.n_cols()
        )));
    }
    let ids: Vec<usize> = (0..partition.colors.len())
        .filter(|&m| m != GREY || config.screen_grey)
        .filter(|&m| !partition.members(m).is_empty())
        .collect();
    let modules = ids
        .par_iter()
        .map(|&m| {
            let members = partition.members(m);
            let trace = rfe_rf(
                data,
                &members,
                config.drop_fraction,
                config.module_target(members.len()),
                config.screen_trees,
                &config.tree_params,
                derive_seed(config.seed, &[tag::MODULE, m as u64]),
            )?;
            Ok(ModuleScreen {
                module: m,
                color: partition.colors[m].clone(),
                size: members.len(),
                trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut survivors: Vec<usize> = modules.iter().flat_map(|m| m.trace.survivors().iter().copied()).collect();
    survivors.sort_unstable();
    if survivors.is_empty() {
        warn!("module screening produced no survivors; every feature is grey");
    }
    Ok(Screening { modules, survivors })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub rank: usize,
    pub column: usize,
    pub name: String,
    pub vim: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub trace: RfeTrace,
    pub ranked: Vec<RankedFeature>,
}

/// One RFE-RF over the screening survivors down to `final_k`, ranked by
/// the importances of the last round.
pub fn select_features(survivors: &[usize], data: &FeatureMatrix, config: &FuzzyConfig) -> Result<Selection> {
    config.validate()?;
    if survivors.is_empty() {
        return Err(Error::NoSurvivors);
    }
    let trace = rfe_rf(
        data,
        survivors,
        config.drop_fraction,
        config.final_k,
        config.select_trees,
        &config.tree_params,
        derive_seed(config.seed, &[tag::SELECT]),
    )?;
    let vim = trace.last_vim().expect("rfe always records a round");
    let ranked = vim
        .ranked()
        .take(config.final_k)
        .enumerate()
        .map(|(i, (column, vim))| RankedFeature {
            rank: i + 1,
            column,
            name: data.name(column).to_string(),
            vim,
        })
        .collect();
    Ok(Selection { trace, ranked })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleSummary {
    pub beta: f64,
    pub beta_selection: Option<BetaSelection>,
    pub cut_height: f64,
    pub dendrogram: Dendrogram,
    pub partition: ModulePartition,
}

/// Audit trail of a full run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzyResult {
    pub config: FuzzyConfig,
    pub modules: ModuleSummary,
    pub screening: Screening,
    pub selection: Selection,
    pub final_forest: Forest,
}

impl FuzzyResult {
    pub fn selected_columns(&self) -> Vec<usize> {
        self.selection.ranked.iter().map(|r| r.column).collect()
    }
}

/// Modules, screening, selection, and a final forest on the ranked top-k.
pub fn run_pipeline(data: &FeatureMatrix, wgcna: &WgcnaConfig, config: &FuzzyConfig) -> Result<FuzzyResult> {
    config.validate()?;
    data.labels()?;
    let found = find_modules(data, wgcna)?;
    let modules = ModuleSummary {
        beta: found.beta,
        beta_selection: found.beta_selection,
        cut_height: found.cut_height,
        dendrogram: found.dendrogram,
        partition: found.partition,
    };
    run_with_modules(data, modules, config)
}

/// The pipeline from screening onward, with modules already formed.
pub fn run_with_modules(data: &FeatureMatrix, modules: ModuleSummary, config: &FuzzyConfig) -> Result<FuzzyResult> {
    let screening = screen_modules(&modules.partition, data, config)?;
    let selection = select_features(&screening.survivors, data, config)?;
    let top: Vec<usize> = selection.ranked.iter().map(|r| r.column).collect();
    let final_forest = fit_forest(
        data,
        &top,
        config.select_trees,
        &config.tree_params,
        derive_seed(config.seed, &[tag::FINAL]),
    )?;
    Ok(FuzzyResult {
        config: config.clone(),
        modules,
        screening,
        selection,
        final_forest,
    })
}
