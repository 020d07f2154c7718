//! Predictive mean matching (PMM) hot-deck imputation.
//!
//! Columns are filled one at a time in increasing order of missingness.
//! For each column a least-squares predictor is fit on the currently
//! complete covariates (categoricals integer-coded by first appearance);
//! each missing cell then copies the observed value of a donor drawn
//! uniformly from the `donor_pool_size` observed rows whose predicted means
//! are closest to its own. Imputed values are therefore always observed
//! values of the same column.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::table::{ColumnKind, RawTable};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::rng::{stream, tag};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovariatePolicy {
    /// Every column that is complete when the target column is imputed.
    AllComplete,
    /// Only these columns, and only once they are complete.
    Columns(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImputeConfig {
    pub donor_pool_size: usize,
    pub rng_seed: u64,
    pub covariates: CovariatePolicy,
}

impl Default for ImputeConfig {
    fn default() -> Self {
        ImputeConfig {
            donor_pool_size: 5,
            rng_seed: 0,
            covariates: CovariatePolicy::AllComplete,
        }
    }
}

/// Numeric coding of a column: parsed values for numeric columns, level
/// codes in first-appearance order for categoricals. Missing cells are NaN.
fn code_column(name: &str, kind: ColumnKind, cells: &[Option<String>]) -> Result<Vec<f64>> {
    match kind {
        ColumnKind::Numeric => cells
            .iter()
            .enumerate()
            .map(|(row, c)| match c {
                None => Ok(f64::NAN),
                Some(text) => text.trim().parse::<f64>().map_err(|_| Error::NotNumeric {
                    column: name.to_string(),
                    row,
                    value: text.clone(),
                }),
            })
            .collect(),
        ColumnKind::Categorical => {
            let mut codes: HashMap<&str, f64> = HashMap::new();
            Ok(cells
                .iter()
                .map(|c| match c {
                    None => f64::NAN,
                    Some(text) => {
                        let next = codes.len() as f64;
                        *codes.entry(text.as_str()).or_insert(next)
                    }
                })
                .collect())
        }
    }
}

pub fn impute_pmm(table: &RawTable, config: &ImputeConfig) -> Result<RawTable> {
    if config.donor_pool_size == 0 {
        return Err(Error::InvalidConfig("donor_pool_size must be at least 1".into()));
    }
    if table.is_complete() {
        return Ok(table.clone());
    }

    let n = table.n_rows();
    let p = table.n_cols();
    let missing: Vec<usize> = (0..p)
        .map(|j| table.column(j).iter().filter(|c| c.is_none()).count())
        .collect();
    for j in 0..p {
        let observed = n - missing[j];
        if missing[j] > 0 && observed == 0 {
            return Err(Error::ColumnAllMissing {
                column: table.names()[j].clone(),
            });
        }
        if missing[j] > 0 && observed < config.donor_pool_size {
            return Err(Error::DonorPoolUnsatisfiable {
                column: table.names()[j].clone(),
                observed,
                required: config.donor_pool_size,
            });
        }
    }

    let allowed: Option<Vec<usize>> = match &config.covariates {
        CovariatePolicy::AllComplete => None,
        CovariatePolicy::Columns(names) => Some(
            names
                .iter()
                .map(|name| table.column_index(name))
                .collect::<Result<_>>()?,
        ),
    };

    let mut order: Vec<usize> = (0..p).filter(|&j| missing[j] > 0).collect();
    order.sort_by_key(|&j| (missing[j], j));

    let mut out = table.clone();
    let mut coded: Vec<Option<Vec<f64>>> = (0..p)
        .map(|j| {
            if missing[j] == 0 {
                code_column(&table.names()[j], table.kinds()[j], table.column(j)).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;

    for &target in &order {
        let codes = code_column(&table.names()[target], table.kinds()[target], table.column(target))?;
        let covariates: Vec<&[f64]> = (0..p)
            .filter(|j| allowed.as_ref().is_none_or(|a| a.contains(j)))
            .filter_map(|j| coded[j].as_deref())
            .collect();
        let observed: Vec<usize> = (0..n).filter(|&r| !codes[r].is_nan()).collect();
        let predicted = predicted_means(&covariates, &codes, &observed);

        let mut rng = stream(config.rng_seed, &[tag::IMPUTE, target as u64]);
        let mut tie_key: Vec<usize> = (0..n).collect();
        tie_key.shuffle(&mut rng);

        let mut donors = observed.clone();
        donors.sort_by(|&a, &b| {
            predicted[a]
                .total_cmp(&predicted[b])
                .then(tie_key[a].cmp(&tie_key[b]))
        });
        let donor_means: Vec<f64> = donors.iter().map(|&r| predicted[r]).collect();

        let source = table.column(target);
        let mut filled = source.to_vec();
        let mut filled_codes = codes.clone();
        for row in (0..n).filter(|&r| codes[r].is_nan()) {
            let pool = nearest_donors(
                &donors,
                &donor_means,
                &tie_key,
                predicted[row],
                config.donor_pool_size,
            );
            let donor = pool[rng.random_range(0..pool.len())];
            filled[row] = source[donor].clone();
            filled_codes[row] = codes[donor];
        }
        *out.column_mut(target) = filled;
        coded[target] = Some(filled_codes);
    }
    Ok(out)
}

/// Least-squares fit on the observed rows, evaluated on every row.
fn predicted_means(covariates: &[&[f64]], target: &[f64], observed: &[usize]) -> Vec<f64> {
    let n = target.len();
    let cov_obs: Vec<Vec<f64>> = covariates
        .iter()
        .map(|c| observed.iter().map(|&r| c[r]).collect())
        .collect();
    let cov_refs: Vec<&[f64]> = cov_obs.iter().map(Vec::as_slice).collect();
    let y: Vec<f64> = observed.iter().map(|&r| target[r]).collect();
    let coef = least_squares(&cov_refs, &y);
    (0..n)
        .map(|r| {
            coef[0]
                + covariates
                    .iter()
                    .zip(&coef[1..])
                    .map(|(c, b)| b * c[r])
                    .sum::<f64>()
        })
        .collect()
}

/// The `k` donors nearest to `mean`, ties by `tie_key`.
///
/// `donors` is sorted by (predicted mean, tie key) and `donor_means` holds
/// the matching means.
fn nearest_donors(
    donors: &[usize],
    donor_means: &[f64],
    tie_key: &[usize],
    mean: f64,
    k: usize,
) -> Vec<usize> {
    let split = donor_means.partition_point(|&m| m < mean);
    let (mut left, mut right) = (split, split);
    let mut picked: Vec<(f64, usize)> = Vec::with_capacity(k + 4);
    loop {
        let dl = (left > 0).then(|| mean - donor_means[left - 1]);
        let dr = (right < donors.len()).then(|| donor_means[right] - mean);
        let next = match (dl, dr) {
            (None, None) => break,
            (Some(l), None) => (l, true),
            (None, Some(r)) => (r, false),
            (Some(l), Some(r)) => (l.min(r), l <= r),
        };
        if picked.len() >= k && next.0 > picked[k - 1].0 {
            break;
        }
        if next.1 {
            left -= 1;
            picked.push((next.0, donors[left]));
        } else {
            picked.push((next.0, donors[right]));
            right += 1;
        }
    }
    picked.sort_by(|a, b| a.0.total_cmp(&b.0).then(tie_key[a.1].cmp(&tie_key[b.1])));
    picked.truncate(k);
    picked.into_iter().map(|(_, r)| r).collect()
}
