use log::warn;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, tag};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold of each row.
    pub assignment: Vec<usize>,
    pub stratified: bool,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&r| self.assignment[r] == fold)
            .collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&r| self.assignment[r] != fold)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffled k-fold assignment. Rows are dealt round-robin after shuffling;
/// in stratified mode each class is shuffled separately and the classes are
/// dealt one after the other, so every fold gets its proportional share of
/// each class to within one row.
pub fn kfold_split(n: usize, k: usize, labels: Option<&[u8]>, stratified: bool, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidConfig(format!("k = {k} must be in 2..={n}")));
    }
    let mut rng = stream(seed, &[tag::SPLIT]);
    let mut stratified = stratified;
    if stratified {
        match labels {
            None => {
                warn!("stratified split requested without labels; splitting unstratified");
                stratified = false;
            }
            Some(l) if l.len() != n => {
                return Err(Error::DimensionMismatch(format!("{} labels for {n} rows", l.len())));
            }
            Some(l) => {
                let ones = l.iter().filter(|&&v| v == 1).count();
                if [n - ones, ones].iter().any(|&c| c > 0 && c < k) {
                    warn!("a class has fewer than {k} members; splitting unstratified");
                    stratified = false;
                }
            }
        }
    }
    let order: Vec<usize> = match (stratified, labels) {
        (true, Some(labels)) => {
            let mut out = Vec::with_capacity(n);
            for class in [0u8, 1] {
                let mut rows: Vec<usize> = (0..n).filter(|&r| labels[r] == class).collect();
                rows.shuffle(&mut rng);
                out.extend(rows);
            }
            out
        }
        _ => {
            let mut rows: Vec<usize> = (0..n).collect();
            rows.shuffle(&mut rng);
            rows
        }
    };
    let mut assignment = vec![0; n];
    for (i, &r) in order.iter().enumerate() {
        assignment[r] = i % k;
    }
    Ok(FoldPlan {
        k,
        assignment,
        stratified,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_split() {
        let plan = kfold_split(10, 5, None, false, 1).unwrap();
        assert_eq!(plan.sizes(), vec![2; 5]);
    }

    #[test]
    fn stratified_balanced_classes() {
        let labels = [0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let plan = kfold_split(10, 5, Some(&labels), true, 7).unwrap();
        assert!(plan.stratified);
        for f in 0..5 {
            let rows = plan.test_rows(f);
            assert_eq!(rows.len(), 2);
            assert_eq!(rows.iter().map(|&r| labels[r] as usize).sum::<usize>(), 1);
        }
    }

    #[test]
    fn large_even_split() {
        let plan = kfold_split(43_890, 10, None, false, 3).unwrap();
        assert_eq!(plan.sizes(), vec![4389; 10]);
    }

    #[test]
    fn k_larger_than_n_is_rejected() {
        assert!(kfold_split(3, 4, None, false, 1).is_err());
        assert!(kfold_split(3, 1, None, false, 1).is_err());
    }

    #[test]
    fn rare_class_falls_back_to_unstratified() {
        let labels = [0, 0, 0, 0, 0, 0, 1, 1];
        let plan = kfold_split(8, 4, Some(&labels), true, 2).unwrap();
        assert!(!plan.stratified);
        assert_eq!(plan.sizes(), vec![2; 4]);
    }
}
