//! Fold assignment for cross-validation and consensus rounds.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::IncomeClass;
use crate::error::{Error, Result};

/// A reproducible assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Fold index of each row, in row order.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn n_rows(&self) -> usize {
        self.assignments.len()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Assign rows to `k` folds, optionally stratified by class.
///
/// Fold sizes always differ by at most one. With stratification the same
/// bound additionally holds within every class: rows of each class are
/// shuffled, then dealt round-robin with a cursor that runs on across
/// classes, which preserves the global balance too. `k = n` is leave-one-out.
pub fn make_folds(
    labels: &[IncomeClass],
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<FoldPlan> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::Invalid(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::Invalid(format!(
            "cannot split {n} rows into {k} folds"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; n];

    if stratified {
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); IncomeClass::ALL.len()];
        for (i, l) in labels.iter().enumerate() {
            by_class[l.index()].push(i);
        }
        let mut cursor = 0usize;
        for class_rows in by_class.iter_mut() {
            class_rows.shuffle(&mut rng);
            for &row in class_rows.iter() {
                assignments[row] = cursor % k;
                cursor += 1;
            }
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for (pos, &row) in order.iter().enumerate() {
            assignments[row] = pos % k;
        }
    }

    Ok(FoldPlan {
        k,
        seed,
        stratified,
        assignments,
    })
}
