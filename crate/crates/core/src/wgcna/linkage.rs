use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wgcna::network::SquareMatrix;

/// One agglomeration step. Leaves are ids `0..p`; the cluster created by
/// step `s` has id `p + s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    pub fn max_height(&self) -> f64 {
        self.merges.iter().map(|m| m.height).fold(0.0, f64::max)
    }

    /// Height of node `id`; leaves sit at 0.
    pub fn node_height(&self, id: usize) -> f64 {
        if id < self.n_leaves {
            0.0
        } else {
            self.merges[id - self.n_leaves].height
        }
    }

    /// Leaves in left-to-right plotting order.
    pub fn leaf_order(&self) -> Vec<usize> {
        if self.merges.is_empty() {
            return (0..self.n_leaves).collect();
        }
        let mut order = Vec::with_capacity(self.n_leaves);
        let mut stack = vec![self.n_leaves + self.merges.len() - 1];
        while let Some(id) = stack.pop() {
            if id < self.n_leaves {
                order.push(id);
            } else {
                let m = &self.merges[id - self.n_leaves];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        order
    }
}

fn validate(d: &SquareMatrix) -> Result<()> {
    let p = d.dim();
    for i in 0..p {
        if d.get(i, i).abs() > 1e-9 {
            return Err(Error::InvalidDissimilarity(format!("nonzero diagonal at {i}")));
        }
        for j in 0..p {
            let v = d.get(i, j);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidDissimilarity(format!("entry ({i}, {j}) = {v}")));
            }
            if (v - d.get(j, i)).abs() > 1e-9 {
                return Err(Error::InvalidDissimilarity(format!("asymmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Average-linkage (UPGMA) agglomerative clustering.
///
/// At each step the closest pair of active clusters merges; among equal
/// distances the pair with the smallest slot indices wins. The merged
/// cluster takes the lower slot. Heights are kept non-decreasing so float
/// rounding cannot produce an inversion.
pub fn linkage_average(dissim: &SquareMatrix) -> Result<Dendrogram> {
    validate(dissim)?;
    let p = dissim.dim();
    let mut dist = dissim.clone();
    let mut active: Vec<bool> = vec![true; p];
    let mut ids: Vec<usize> = (0..p).collect();
    let mut sizes: Vec<usize> = vec![1; p];
    let mut merges = Vec::with_capacity(p.saturating_sub(1));
    let mut last_height = 0.0f64;

    for step in 0..p.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..p).filter(|&i| active[i]) {
            let row = dist.row(i);
            for j in (i + 1..p).filter(|&j| active[j]) {
                if best.is_none_or(|(b, _, _)| row[j] < b) {
                    best = Some((row[j], i, j));
                }
            }
        }
        let (d, a, b) = best.expect("at least two active clusters");
        let (na, nb) = (sizes[a] as f64, sizes[b] as f64);
        for k in (0..p).filter(|&k| active[k] && k != a && k != b) {
            let v = (na * dist.get(a, k) + nb * dist.get(b, k)) / (na + nb);
            dist.set(a, k, v);
            dist.set(k, a, v);
        }
        last_height = last_height.max(d);
        let (left, right) = (ids[a].min(ids[b]), ids[a].max(ids[b]));
        merges.push(Merge {
            left,
            right,
            height: last_height,
            size: sizes[a] + sizes[b],
        });
        active[b] = false;
        sizes[a] += sizes[b];
        ids[a] = p + step;
    }
    Ok(Dendrogram { n_leaves: p, merges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_leaves_merge_at_their_distance() {
        let d = SquareMatrix::from_rows(&[vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
        let dend = linkage_average(&d).unwrap();
        assert_eq!(dend.merges, vec![Merge { left: 0, right: 1, height: 0.3, size: 2 }]);
    }

    #[test]
    fn three_leaves_hand_upgma() {
        let d = SquareMatrix::from_rows(&[
            vec![0.0, 0.1, 0.8],
            vec![0.1, 0.0, 0.8],
            vec![0.8, 0.8, 0.0],
        ])
        .unwrap();
        let dend = linkage_average(&d).unwrap();
        assert_eq!(dend.merges[0], Merge { left: 0, right: 1, height: 0.1, size: 2 });
        assert_eq!(dend.merges[1], Merge { left: 2, right: 3, height: 0.8, size: 3 });
        assert_eq!(dend.leaf_order(), vec![2, 0, 1]);
    }

    #[test]
    fn average_of_unequal_clusters() {
        // {0,1} at 0.2, then 2 joins at mean(0.5, 0.7) = 0.6.
        let d = SquareMatrix::from_rows(&[
            vec![0.0, 0.2, 0.5],
            vec![0.2, 0.0, 0.7],
            vec![0.5, 0.7, 0.0],
        ])
        .unwrap();
        let dend = linkage_average(&d).unwrap();
        assert!((dend.merges[1].height - 0.6).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_dissimilarities() {
        let asym = SquareMatrix::from_rows(&[vec![0.0, 0.3], vec![0.4, 0.0]]).unwrap();
        assert!(linkage_average(&asym).is_err());
        let neg = SquareMatrix::from_rows(&[vec![0.0, -0.3], vec![-0.3, 0.0]]).unwrap();
        assert!(linkage_average(&neg).is_err());
    }
}
