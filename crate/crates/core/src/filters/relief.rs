//! ReliefF attribute weighting.
//!
//! Exhaustive variant: every row serves as a target instance. For each
//! instance the k nearest same-class rows (hits) and the k nearest rows of
//! every other class (misses) pull each attribute's weight down or up by the
//! normalized per-attribute difference. Miss contributions are weighted by
//! the prior of the miss class renormalized over the non-target classes.

use crate::dataset::{ColumnData, Dataset};
use crate::error::{Error, Result};

/// Neighbors considered per class.
pub const RELIEF_K: usize = 10;

/// Per-column ReliefF weights with the default neighborhood size.
pub fn relief_weights(d: &Dataset) -> Result<Vec<f64>> {
    relief_weights_k(d, RELIEF_K)
}

/// Per-column ReliefF weights with `k` neighbors per class.
///
/// Distances are Euclidean over column values (nominal columns contribute
/// 0/1 mismatches); numeric columns are expected standardized upstream so
/// dimensions are comparable. Weight updates use range-normalized
/// differences, keeping every weight in [-1, 1]. The update sum is divided
/// by `rows * k` with the configured k even when a class has fewer
/// neighbors available, matching the usual implementation.
pub fn relief_weights_k(d: &Dataset, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Invalid("relief needs k >= 1".into()));
    }
    let n = d.n_rows();
    if n < 2 {
        return Err(Error::Invalid("relief needs at least 2 rows".into()));
    }
    let labels = d.label_ids();
    let n_classes = d.n_classes();
    let counts = d.class_counts();
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::Invalid("relief needs at least 2 classes present".into()));
    }

    let n_cols = d.n_cols();
    // Column views and normalization ranges. A zero range mutes the column
    // in the update (its normalized difference is defined as 0).
    struct ColView<'a> {
        numeric: Option<&'a [f64]>,
        codes: Option<&'a [u32]>,
        inv_range: f64,
    }
    let views: Vec<ColView> = d
        .columns()
        .iter()
        .map(|c| match &c.data {
            ColumnData::Numeric(v) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &x in v {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                let range = hi - lo;
                ColView {
                    numeric: Some(v),
                    codes: None,
                    inv_range: if range > 0.0 { 1.0 / range } else { 0.0 },
                }
            }
            ColumnData::Nominal { codes, .. } => ColView {
                numeric: None,
                codes: Some(codes),
                inv_range: 1.0,
            },
        })
        .collect();

    let priors: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();

    let diff_norm = |col: &ColView, a: usize, b: usize| -> f64 {
        if let Some(v) = col.numeric {
            (v[a] - v[b]).abs() * col.inv_range
        } else {
            let codes = col.codes.expect("nominal view");
            if codes[a] == codes[b] {
                0.0
            } else {
                1.0
            }
        }
    };

    let mut weights = vec![0.0f64; n_cols];
    let mut dist2 = vec![0.0f64; n];
    // (distance^2, row) per class, reused across instances.
    let mut per_class: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n_classes];

    for i in 0..n {
        for row in per_class.iter_mut() {
            row.clear();
        }
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut s = 0.0;
            for col in &views {
                let dv = if let Some(v) = col.numeric {
                    v[i] - v[j]
                } else {
                    let codes = col.codes.expect("nominal view");
                    if codes[i] == codes[j] {
                        0.0
                    } else {
                        1.0
                    }
                };
                s += dv * dv;
            }
            dist2[j] = s;
            per_class[labels[j]].push((s, j));
        }

        let target_class = labels[i];
        for class in 0..n_classes {
            let candidates = &mut per_class[class];
            if candidates.is_empty() {
                continue;
            }
            // k nearest, ties to the lower row index.
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let take = candidates.len().min(k);
            if class == target_class {
                for &(_, j) in &candidates[..take] {
                    for (w, col) in weights.iter_mut().zip(&views) {
                        *w -= diff_norm(col, i, j);
                    }
                }
            } else {
                let scale = priors[class] / (1.0 - priors[target_class]);
                for &(_, j) in &candidates[..take] {
                    for (w, col) in weights.iter_mut().zip(&views) {
                        *w += scale * diff_norm(col, i, j);
                    }
                }
            }
        }
    }

    let norm = (n * k) as f64;
    for w in weights.iter_mut() {
        *w /= norm;
    }
    Ok(weights)
}
