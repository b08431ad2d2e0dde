//! One-rule classifier: the single best attribute, discretized, mapping each
//! bin to its majority class.

use crate::dataset::Matrix;
use crate::error::{Error, Result};
use crate::filters::{equal_freq_cuts, BinningSpec};

#[derive(Debug, Clone)]
pub struct OneRuleModel {
    pub col: usize,
    cuts: Vec<f64>,
    /// Training class distribution per bin.
    bin_dist: Vec<Vec<f64>>,
    /// Overall class distribution; covers degenerate lookups.
    fallback: Vec<f64>,
}

fn column_cuts(values: &[f64], n_bins: usize) -> Result<Vec<f64>> {
    match equal_freq_cuts(values, n_bins) {
        Ok(cuts) => Ok(cuts),
        // Constant column: a single bin holding everything.
        Err(Error::Data(_)) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

fn bin_of(cuts: &[f64], v: f64) -> usize {
    cuts.iter().take_while(|&&c| c < v).count()
}

/// Pick the column whose one-rule training error is lowest (ties to the
/// lower column index). Numeric values are discretized with the shared
/// equal-frequency default; the learned cut points are kept for prediction.
pub(crate) fn train(x: &Matrix, y: &[usize], n_classes: usize) -> Result<OneRuleModel> {
    if x.cols == 0 {
        return Err(Error::Invalid("one-rule needs at least one column".into()));
    }
    if x.rows == 0 {
        return Err(Error::Invalid("one-rule needs at least one row".into()));
    }
    let n_bins_spec = BinningSpec::default().n_bins;
    let mut overall = vec![0usize; n_classes];
    for &c in y {
        overall[c] += 1;
    }

    let mut best: Option<(usize, usize, Vec<f64>, Vec<Vec<usize>>)> = None;
    let mut values = vec![0.0f64; x.rows];
    for col in 0..x.cols {
        for (i, v) in values.iter_mut().enumerate() {
            *v = x.get(i, col);
        }
        let cuts = column_cuts(&values, n_bins_spec)?;
        let mut table = vec![vec![0usize; n_classes]; cuts.len() + 1];
        for (i, &v) in values.iter().enumerate() {
            table[bin_of(&cuts, v)][y[i]] += 1;
        }
        let correct: usize = table
            .iter()
            .map(|row| row.iter().max().copied().unwrap_or(0))
            .sum();
        let errors = x.rows - correct;
        let better = match &best {
            None => true,
            Some((_, best_err, _, _)) => errors < *best_err,
        };
        if better {
            best = Some((col, errors, cuts, table));
        }
    }

    let (col, _, cuts, table) = best.expect("at least one column");
    let fallback = overall
        .iter()
        .map(|&c| c as f64 / x.rows as f64)
        .collect();
    let bin_dist = table
        .iter()
        .map(|row| {
            let total: usize = row.iter().sum();
            if total == 0 {
                Vec::new()
            } else {
                row.iter().map(|&c| c as f64 / total as f64).collect()
            }
        })
        .collect();
    Ok(OneRuleModel {
        col,
        cuts,
        bin_dist,
        fallback,
    })
}

impl OneRuleModel {
    pub fn distribution(&self, x: &[f64]) -> Vec<f64> {
        let bin = bin_of(&self.cuts, x[self.col]);
        match self.bin_dist.get(bin) {
            Some(d) if !d.is_empty() => d.clone(),
            _ => self.fallback.clone(),
        }
    }
}
