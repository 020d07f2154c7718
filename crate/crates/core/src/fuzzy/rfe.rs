//! Recursive feature elimination driven by random-forest permutation
//! importance.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::forest::{fit_forest, oob_error, permutation_vim, TreeParams, VimTable};
use crate::rng::{derive_seed, tag};

/// One fit-rank-drop cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfeRound {
    /// Features the round's forest was fit on, ascending.
    pub features: Vec<usize>,
    pub vim: VimTable,
    pub n_trees: usize,
    pub mtry: usize,
    /// `None` when every row was in-bag for every tree.
    pub oob_error: Option<f64>,
    /// Features carried into the next round, ascending.
    pub kept: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfeTrace {
    pub stop_target: usize,
    pub rounds: Vec<RfeRound>,
}

impl RfeTrace {
    pub fn survivors(&self) -> &[usize] {
        self.rounds.last().map_or(&[], |r| r.kept.as_slice())
    }

    /// Sizes of the fitted sets, round by round.
    pub fn sizes(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.features.len()).collect()
    }

    pub fn last_vim(&self) -> Option<&VimTable> {
        self.rounds.last().map(|r| &r.vim)
    }
}

/// `ceil(x)` that ignores float noise just above an integer.
pub(crate) fn ceil_tolerant(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Survivor count after one elimination round:
/// `max(stop, ceil((1 - drop) * current))`, forced one lower when that would
/// not shrink the set.
pub fn next_survivor_count(current: usize, stop_target: usize, drop_fraction: f64) -> usize {
    if current <= stop_target {
        return current;
    }
    let next = stop_target.max(ceil_tolerant((1.0 - drop_fraction) * current as f64));
    if next >= current {
        current - 1
    } else {
        next
    }
}

/// Fits, ranks and trims until `stop_target` features remain, recording
/// every round. The last round fits on exactly `stop_target` features and
/// keeps them all, so its importance table ranks the final set.
pub fn rfe_rf(
    data: &FeatureMatrix,
    features: &[usize],
    drop_fraction: f64,
    stop_target: usize,
    n_trees: usize,
    params: &TreeParams,
    seed: u64,
) -> Result<RfeTrace> {
    if features.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    if stop_target == 0 {
        return Err(Error::InvalidConfig("stop target must be at least 1".into()));
    }
    if !(drop_fraction > 0.0 && drop_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("drop fraction {drop_fraction} outside (0, 1)")));
    }
    if stop_target > features.len() {
        warn!(
            "stop target {stop_target} exceeds the {} available features; ranking without elimination",
            features.len()
        );
    }
    let mut current = features.to_vec();
    current.sort_unstable();
    let mut rounds = Vec::new();
    loop {
        let round = rounds.len() as u64;
        let round_params = TreeParams {
            mtry: params.mtry.map(|m| m.min(current.len())),
            ..params.clone()
        };
        let forest = fit_forest(
            data,
            &current,
            n_trees,
            &round_params,
            derive_seed(seed, &[tag::RFE_ROUND, round]),
        )?;
        let vim = permutation_vim(&forest, data, derive_seed(seed, &[tag::VIM, round]))?;
        let oob = match oob_error(&forest, data) {
            Ok(o) => Some(o.error),
            Err(Error::NoOutOfBagRows) => None,
            Err(e) => return Err(e),
        };
        let keep = next_survivor_count(current.len(), stop_target, drop_fraction);
        let mut kept = vim.top(keep);
        kept.sort_unstable();
        let done = kept.len() == current.len();
        rounds.push(RfeRound {
            features: current,
            vim,
            n_trees,
            mtry: forest.mtry,
            oob_error: oob,
            kept: kept.clone(),
        });
        if done {
            break;
        }
        current = kept;
    }
    Ok(RfeTrace { stop_target, rounds })
}
