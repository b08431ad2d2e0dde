//! Subset fitness: cross-validated logistic-regression accuracy.
//!
//! A GA run evaluates on the order of a hundred thousand subsets, so this
//! path is built around a fold-sorted feature matrix: rows are permuted once
//! so each inner fold is one contiguous range, training sees the two flanks
//! in place, and per-subset work is one column gather plus the regression
//! passes. Results are cached by bit pattern; the cache is observable only
//! through runtime, never through returned values.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::classify::{count_correct_span, lr_train_span, LogisticConfig, RowSpan};
use crate::dataset::{make_folds, Dataset, Matrix};
use crate::error::{Error, Result};

/// Scores a candidate subset encoded as one bit per candidate attribute.
/// Implementations must be pure: same bits, same value.
pub trait SubsetFitness {
    fn eval(&self, bits: &[bool]) -> f64;
}

impl<F: Fn(&[bool]) -> f64> SubsetFitness for F {
    fn eval(&self, bits: &[bool]) -> f64 {
        self(bits)
    }
}

/// How wrapper fitness estimates accuracy.
///
/// The regression budget is deliberately small: fitness only has to order
/// subsets, not converge, and the wrapper invokes the trainer five times per
/// evaluated subset. Final-phase evaluation uses the full-precision
/// classifier defaults instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessConfig {
    pub inner_folds: usize,
    pub seed: u64,
    pub lr: LogisticConfig,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        FitnessConfig {
            inner_folds: 5,
            seed: 0,
            lr: LogisticConfig {
                ridge: 1e-8,
                max_iter: 5,
                tol: 1e-4,
            },
        }
    }
}

impl FitnessConfig {
    pub fn with_seed(seed: u64) -> FitnessConfig {
        FitnessConfig {
            seed,
            ..FitnessConfig::default()
        }
    }
}

/// Stratified-CV logistic-regression accuracy over candidate attribute
/// subsets of one dataset.
///
/// Bit `j` stands for `candidates()[j]`, the j-th attribute that still owns
/// columns. The empty subset scores the majority-class prior without
/// training.
pub struct CvAccuracyFitness {
    x: Matrix,
    y: Vec<usize>,
    n_classes: usize,
    /// Contiguous `[start, end)` row range of each fold in `x`.
    fold_ranges: Vec<(usize, usize)>,
    candidates: Vec<usize>,
    cand_cols: Vec<Vec<usize>>,
    baseline: f64,
    lr: LogisticConfig,
    cache: Mutex<HashMap<Vec<bool>, f64>>,
    evals: AtomicUsize,
}

impl CvAccuracyFitness {
    pub fn new(d: &Dataset, cfg: &FitnessConfig) -> Result<CvAccuracyFitness> {
        let n = d.n_rows();
        if n < 2 {
            return Err(Error::Invalid(format!(
                "fitness needs at least 2 rows, got {n}"
            )));
        }
        let candidates = d.present_attributes();
        if candidates.is_empty() {
            return Err(Error::Invalid("no attributes own columns".into()));
        }
        // Tiny datasets degrade toward leave-one-out instead of failing.
        let k = cfg.inner_folds.clamp(2, n);
        let plan = make_folds(d.labels(), k, cfg.seed, true)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&r| plan.assignments[r]);
        let mut fold_ranges = Vec::with_capacity(k);
        let mut start = 0;
        for fold in 0..k {
            let len = order[start..]
                .iter()
                .take_while(|&&r| plan.assignments[r] == fold)
                .count();
            fold_ranges.push((start, start + len));
            start += len;
        }

        let full = d.feature_matrix();
        let mut x = Matrix::zeros(n, full.cols);
        let labels = d.label_ids();
        let mut y = Vec::with_capacity(n);
        for (pos, &r) in order.iter().enumerate() {
            x.row_mut(pos).copy_from_slice(full.row(r));
            y.push(labels[r]);
        }

        // Column-standardize the working matrix once, globally. The wrapper
        // only has to rank subsets, and a common scale keeps its tight
        // gradient budget meaningful on every column regardless of raw
        // units. (Final evaluation re-fits scaling per fold instead.)
        let m = x.cols;
        let mut mean = vec![0.0f64; m];
        for i in 0..n {
            for (s, v) in mean.iter_mut().zip(x.row(i)) {
                *s += v;
            }
        }
        for s in mean.iter_mut() {
            *s /= n as f64;
        }
        let mut scale = vec![0.0f64; m];
        for i in 0..n {
            for ((s, v), mu) in scale.iter_mut().zip(x.row(i)).zip(&mean) {
                *s += (v - mu) * (v - mu);
            }
        }
        for s in scale.iter_mut() {
            let sd = if n > 1 { (*s / (n - 1) as f64).sqrt() } else { 0.0 };
            *s = if sd > 0.0 { 1.0 / sd } else { 1.0 };
        }
        for i in 0..n {
            for ((v, mu), inv) in x.row_mut(i).iter_mut().zip(&mean).zip(&scale) {
                *v = (*v - mu) * inv;
            }
        }

        let cand_cols = candidates.iter().map(|&a| d.attr_columns(a)).collect();
        Ok(CvAccuracyFitness {
            x,
            y,
            n_classes: d.n_classes(),
            fold_ranges,
            candidates,
            cand_cols,
            baseline: d.majority_fraction(),
            lr: cfg.lr,
            cache: Mutex::new(HashMap::new()),
            evals: AtomicUsize::new(0),
        })
    }

    /// Attribute ids behind the bit positions, ascending.
    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn n_bits(&self) -> usize {
        self.candidates.len()
    }

    /// Majority-class prior, the empty-subset score.
    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// Number of evaluations computed (cache hits excluded).
    pub fn evaluations(&self) -> usize {
        self.evals.load(Ordering::Relaxed)
    }

    fn evaluate_cols(&self, cols: &[usize]) -> f64 {
        let n = self.x.rows;
        let m = cols.len();
        let mut xs = Matrix::zeros(n, m);
        for i in 0..n {
            let src = self.x.row(i);
            let dst = xs.row_mut(i);
            for (t, &c) in dst.iter_mut().zip(cols) {
                *t = src[c];
            }
        }
        let mut correct = 0usize;
        for &(start, end) in &self.fold_ranges {
            let span = RowSpan {
                skip_start: start,
                skip_end: end,
            };
            let w = lr_train_span(&xs, &self.y, self.n_classes, &self.lr, span);
            correct += count_correct_span(&xs, &self.y, self.n_classes, &w, start, end);
        }
        correct as f64 / n as f64
    }
}

impl SubsetFitness for CvAccuracyFitness {
    fn eval(&self, bits: &[bool]) -> f64 {
        assert_eq!(
            bits.len(),
            self.candidates.len(),
            "chromosome length must match the candidate count"
        );
        let mut cols = Vec::new();
        for (j, &b) in bits.iter().enumerate() {
            if b {
                cols.extend_from_slice(&self.cand_cols[j]);
            }
        }
        if cols.is_empty() {
            return self.baseline;
        }
        if let Some(&v) = self.cache.lock().unwrap().get(bits) {
            return v;
        }
        let v = self.evaluate_cols(&cols);
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.cache.lock().unwrap().insert(bits.to_vec(), v);
        v
    }
}

/// Accuracy of one subset under the default wrapper protocol. `bits` has one
/// entry per attribute id; attributes without columns contribute nothing.
pub fn subset_fitness(bits: &[bool], d: &Dataset, seed: u64) -> Result<f64> {
    if bits.len() != d.n_attributes() {
        return Err(Error::Invalid(format!(
            "{} bits for {} attributes",
            bits.len(),
            d.n_attributes()
        )));
    }
    let fit = CvAccuracyFitness::new(d, &FitnessConfig::with_seed(seed))?;
    let cand_bits: Vec<bool> = fit.candidates().iter().map(|&a| bits[a]).collect();
    Ok(fit.eval(&cand_bits))
}
