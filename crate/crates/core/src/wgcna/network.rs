//! Correlation network construction: Pearson similarity, soft-threshold
//! adjacency, scale-free power selection and topological overlap.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

/// Dense symmetric `p x p` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        Ok(SquareMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Fills a symmetric matrix from upper-triangle rows computed in
    /// parallel; `row_fn(i)` returns entries for `j in i..n`.
    fn symmetric_par(n: usize, row_fn: impl Fn(usize) -> Vec<f64> + Sync + Send) -> Self {
        let upper: Vec<Vec<f64>> = (0..n).into_par_iter().map(row_fn).collect();
        let mut m = SquareMatrix::zeros(n);
        for (i, row) in upper.iter().enumerate() {
            for (offset, &v) in row.iter().enumerate() {
                let j = i + offset;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix(pub SquareMatrix);

#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyMatrix {
    pub matrix: SquareMatrix,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomMatrix(pub SquareMatrix);

/// Pearson correlation of every column pair. Constant columns correlate 0
/// with everything else (1 with themselves).
pub fn correlation_matrix(data: &FeatureMatrix) -> Result<SimilarityMatrix> {
    let n = data.n_rows();
    if n < 2 {
        return Err(Error::InvalidConfig("correlation needs at least 2 rows".into()));
    }
    let p = data.n_cols();
    let centered: Vec<Option<(Vec<f64>, f64)>> = data
        .columns()
        .par_iter()
        .map(|col| {
            if col.iter().all(|&v| v == col[0]) {
                return None;
            }
            let mean = col.iter().sum::<f64>() / n as f64;
            let c: Vec<f64> = col.iter().map(|v| v - mean).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            Some((c, norm))
        })
        .collect();
    Ok(SimilarityMatrix(SquareMatrix::symmetric_par(p, |i| {
        (i..p)
            .map(|j| {
                if i == j {
                    return 1.0;
                }
                match (&centered[i], &centered[j]) {
                    (Some((a, na)), Some((b, nb))) => {
                        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                        (dot / (na * nb)).clamp(-1.0, 1.0)
                    }
                    _ => 0.0,
                }
            })
            .collect()
    })))
}

/// Unsigned soft-threshold adjacency `|s|^beta`, unit diagonal.
pub fn adjacency(sim: &SimilarityMatrix, beta: f64) -> Result<AdjacencyMatrix> {
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::InvalidConfig(format!("soft-threshold power {beta} must be >= 1")));
    }
    let s = &sim.0;
    let matrix = SquareMatrix::from_fn(s.dim(), |i, j| {
        if i == j {
            1.0
        } else {
            s.get(i, j).abs().powf(beta)
        }
    });
    Ok(AdjacencyMatrix { matrix, beta })
}

/// Connectivity `k_i = sum_{u != i} a_iu`.
pub fn connectivity(adj: &AdjacencyMatrix) -> Vec<f64> {
    let m = &adj.matrix;
    (0..m.dim())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|&(u, _)| u != i)
                .map(|(_, a)| a)
                .sum()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleFreeFit {
    pub beta: f64,
    /// `-sign(slope) * R^2` of the log-log degree regression.
    pub fit_index: f64,
    pub slope: f64,
    pub mean_connectivity: f64,
}

pub const SCALE_FREE_THRESHOLD: f64 = 0.8;
pub const FALLBACK_BETA: f64 = 6.0;
const DEGREE_BINS: usize = 10;

/// Scale-free topology fit: connectivities are cut into equal-width bins,
/// and `log10 p(k)` is regressed on `log10` of each bin's mean
/// connectivity. A network whose nodes all share one bin fits trivially.
pub fn scale_free_fit(adj: &AdjacencyMatrix) -> ScaleFreeFit {
    let k = connectivity(adj);
    let p = k.len();
    let mean_connectivity = k.iter().sum::<f64>() / p.max(1) as f64;
    let (lo, hi) = k.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let trivial = ScaleFreeFit {
        beta: adj.beta,
        fit_index: 1.0,
        slope: 0.0,
        mean_connectivity,
    };
    if p == 0 || hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return trivial;
    }
    let width = (hi - lo) / DEGREE_BINS as f64;
    let mut sum = [0.0; DEGREE_BINS];
    let mut count = [0usize; DEGREE_BINS];
    for &v in &k {
        let b = (((v - lo) / width) as usize).min(DEGREE_BINS - 1);
        sum[b] += v;
        count[b] += 1;
    }
    let points: Vec<(f64, f64)> = (0..DEGREE_BINS)
        .filter(|&b| count[b] > 0 && sum[b] > 0.0)
        .map(|b| {
            let mean_k = sum[b] / count[b] as f64;
            (mean_k.log10(), (count[b] as f64 / p as f64).log10())
        })
        .collect();
    if points.len() < 2 {
        return trivial;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 || syy <= 0.0 {
        return ScaleFreeFit {
            slope: 0.0,
            fit_index: 0.0,
            ..trivial
        };
    }
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    ScaleFreeFit {
        beta: adj.beta,
        fit_index: -slope.signum() * r2,
        slope,
        mean_connectivity,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSelection {
    pub beta: f64,
    pub fits: Vec<ScaleFreeFit>,
    /// No candidate reached the threshold.
    pub fallback: bool,
}

pub fn default_beta_candidates() -> Vec<f64> {
    (1..=12).map(f64::from).collect()
}

/// Smallest candidate power whose network passes the scale-free fit
/// threshold; falls back to 6 with a warning.
pub fn pick_beta(sim: &SimilarityMatrix, candidates: &[f64]) -> Result<BetaSelection> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("no candidate powers".into()));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut fits = Vec::with_capacity(sorted.len());
    for &beta in &sorted {
        fits.push(scale_free_fit(&adjacency(sim, beta)?));
    }
    match fits.iter().find(|f| f.fit_index >= SCALE_FREE_THRESHOLD) {
        Some(fit) => Ok(BetaSelection {
            beta: fit.beta,
            fits,
            fallback: false,
        }),
        None => {
            warn!("no soft-threshold power reached scale-free fit {SCALE_FREE_THRESHOLD}; using {FALLBACK_BETA}");
            Ok(BetaSelection {
                beta: FALLBACK_BETA,
                fits,
                fallback: true,
            })
        }
    }
}

/// Unsigned topological overlap:
/// `(sum_{u != i,j} a_iu a_uj + a_ij) / (min(k_i, k_j) + 1 - a_ij)`.
pub fn topological_overlap(adj: &AdjacencyMatrix) -> TomMatrix {
    let a = &adj.matrix;
    let p = a.dim();
    // Off-diagonal copy: with b_ii = 0, (B B)_ij skips u = i and u = j.
    let b = SquareMatrix::from_fn(p, |i, j| if i == j { 0.0 } else { a.get(i, j) });
    let k: Vec<f64> = (0..p).map(|i| b.row(i).iter().sum()).collect();
    TomMatrix(SquareMatrix::symmetric_par(p, |i| {
        let bi = b.row(i);
        (i..p)
            .map(|j| {
                if i == j {
                    return 1.0;
                }
                let bj = b.row(j);
                let shared: f64 = bi.iter().zip(bj).map(|(x, y)| x * y).sum();
                let aij = b.get(i, j);
                let denom = k[i].min(k[j]) + 1.0 - aij;
                assert!(denom > 0.0, "topological overlap denominator vanished at ({i}, {j})");
                ((shared + aij) / denom).clamp(0.0, 1.0)
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(rows: &[Vec<f64>]) -> AdjacencyMatrix {
        AdjacencyMatrix {
            matrix: SquareMatrix::from_rows(rows).unwrap(),
            beta: 1.0,
        }
    }

    #[test]
    fn self_and_negated_correlation() {
        let x: Vec<f64> = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let m = FeatureMatrix::from_columns(vec![x.clone(), neg, vec![2.0; 5]]).unwrap();
        let s = correlation_matrix(&m).unwrap().0;
        assert_eq!(s.get(0, 0), 1.0);
        assert!((s.get(0, 1) + 1.0).abs() < 1e-12);
        assert_eq!(s.get(0, 2), 0.0);
        assert_eq!(s.get(2, 2), 1.0);
    }

    #[test]
    fn adjacency_examples() {
        let sim = SimilarityMatrix(SquareMatrix::from_rows(&[vec![1.0, -0.5, 0.0], vec![-0.5, 1.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap());
        let a = adjacency(&sim, 2.0).unwrap().matrix;
        assert_eq!(a.get(0, 1), 0.25);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.get(1, 2), 1.0);
        assert_eq!(adjacency(&sim, 7.5).unwrap().matrix.get(1, 2), 1.0);
        assert!(adjacency(&sim, 0.5).is_err());
    }

    #[test]
    fn tom_of_complete_graph_is_one() {
        let tom = topological_overlap(&adj(&vec![vec![1.0; 4]; 4])).0;
        for i in 0..4 {
            for j in 0..4 {
                assert!((tom.get(i, j) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tom_of_isolated_pair_is_zero() {
        let tom = topological_overlap(&adj(&[vec![1.0, 0.0], vec![0.0, 1.0]])).0;
        assert_eq!(tom.get(0, 1), 0.0);
    }

    #[test]
    fn tom_of_three_node_path() {
        let tom = topological_overlap(&adj(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
        ]))
        .0;
        assert_eq!(tom.get(1, 2), 0.5);
    }

    #[test]
    fn identical_columns_pick_smallest_power() {
        let x = vec![1.0, 3.0, 2.0, 5.0];
        let m = FeatureMatrix::from_columns(vec![x.clone(), x.clone(), x]).unwrap();
        let sim = correlation_matrix(&m).unwrap();
        let choice = pick_beta(&sim, &[3.0, 2.0, 4.0]).unwrap();
        assert_eq!(choice.beta, 2.0);
        assert!(!choice.fallback);
    }
}
