//! Module formation: correlation network, topological overlap and
//! average-linkage clustering cut into modules with a grey catch-all.

pub mod linkage;
pub mod network;
pub mod partition;

use serde::{Deserialize, Serialize};

pub use linkage::{linkage_average, Dendrogram, Merge};
pub use network::{
    adjacency, connectivity, correlation_matrix, default_beta_candidates, pick_beta, scale_free_fit,
    topological_overlap, AdjacencyMatrix, BetaSelection, ScaleFreeFit, SimilarityMatrix, SquareMatrix, TomMatrix,
};
pub use partition::{adjusted_rand_index, cut_modules, module_color, ModulePartition, GREY};

use crate::data::FeatureMatrix;
use crate::error::Result;

/// Fraction of the highest merge used as the default static cut.
pub const DEFAULT_CUT_FRACTION: f64 = 0.99;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSetting {
    Fixed(f64),
    Auto(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WgcnaConfig {
    pub beta: BetaSetting,
    /// `None` cuts at `DEFAULT_CUT_FRACTION` of the highest merge.
    pub cut_height: Option<f64>,
    pub min_module_size: usize,
}

impl Default for WgcnaConfig {
    fn default() -> Self {
        WgcnaConfig {
            beta: BetaSetting::Auto(default_beta_candidates()),
            cut_height: None,
            min_module_size: 5,
        }
    }
}

pub fn default_cut_height(dend: &Dendrogram) -> f64 {
    DEFAULT_CUT_FRACTION * dend.max_height()
}

#[derive(Clone, Debug)]
pub struct ModuleResult {
    pub beta: f64,
    pub beta_selection: Option<BetaSelection>,
    pub cut_height: f64,
    pub dendrogram: Dendrogram,
    pub partition: ModulePartition,
    pub adjacency: AdjacencyMatrix,
    pub tom: TomMatrix,
}

/// Runs the full module-formation stage on the columns of `data`.
pub fn find_modules(data: &FeatureMatrix, config: &WgcnaConfig) -> Result<ModuleResult> {
    let sim = correlation_matrix(data)?;
    let (beta, beta_selection) = match &config.beta {
        BetaSetting::Fixed(b) => (*b, None),
        BetaSetting::Auto(candidates) => {
            let sel = pick_beta(&sim, candidates)?;
            (sel.beta, Some(sel))
        }
    };
    let adj = adjacency(&sim, beta)?;
    let tom = topological_overlap(&adj);
    let p = tom.0.dim();
    let dissim = SquareMatrix::from_fn(p, |i, j| if i == j { 0.0 } else { 1.0 - tom.0.get(i, j) });
    let dendrogram = linkage_average(&dissim)?;
    let cut_height = config.cut_height.unwrap_or_else(|| default_cut_height(&dendrogram));
    let partition = cut_modules(&dendrogram, cut_height, config.min_module_size)?;
    Ok(ModuleResult {
        beta,
        beta_selection,
        cut_height,
        dendrogram,
        partition,
        adjacency: adj,
        tom,
    })
}
