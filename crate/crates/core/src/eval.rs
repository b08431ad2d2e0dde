//! Cross-validated evaluation: pooled confusion matrices, support-weighted
//! metrics, and the subset-by-classifier comparison table.

use std::collections::BTreeSet;

use crate::classify::{train_on_matrix, ClassifierSpec};
use crate::dataset::{Dataset, FoldPlan, StandardizationParams};
use crate::error::{Error, Result};
use crate::table::{csv_record, fmt_float};

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
    pub n_classes: usize,
}

impl ConfusionMatrix {
    pub fn zeros(n_classes: usize) -> ConfusionMatrix {
        ConfusionMatrix {
            counts: vec![vec![0; n_classes]; n_classes],
            n_classes,
        }
    }

    pub fn add(&mut self, truth: usize, pred: usize) {
        self.counts[truth][pred] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (rs, ro) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in rs.iter_mut().zip(ro) {
                *a += b;
            }
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|r| r.iter().sum::<usize>()).sum()
    }

    pub fn diagonal(&self) -> usize {
        (0..self.n_classes).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.diagonal() as f64 / self.total() as f64
    }
}

/// Build a confusion matrix from parallel truth/prediction slices.
pub fn confusion_matrix(
    truths: &[usize],
    preds: &[usize],
    n_classes: usize,
) -> Result<ConfusionMatrix> {
    if truths.len() != preds.len() {
        return Err(Error::Invalid(format!(
            "{} truths vs {} predictions",
            truths.len(),
            preds.len()
        )));
    }
    if truths.is_empty() {
        return Err(Error::Invalid("no predictions to score".into()));
    }
    let mut cm = ConfusionMatrix::zeros(n_classes);
    for (&t, &p) in truths.iter().zip(preds) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::Invalid(format!(
                "class id out of range: truth {t}, prediction {p}, {n_classes} classes"
            )));
        }
        cm.add(t, p);
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
}

/// Per-class precision/recall/F1 with support weighting.
///
/// A zero denominator (empty class or never-predicted class) yields 0 for
/// the affected metric. The support-weighted recall is computed from the
/// diagonal directly, `sum(TP) / total`, which is the same quantity as
/// `sum(support_c/total * recall_c)` without intermediate rounding, so it
/// equals the accuracy bit for bit.
pub fn weighted_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Invalid("empty confusion matrix".into()));
    }
    let k = cm.n_classes;
    let n = total as f64;
    let mut per_class = Vec::with_capacity(k);
    let mut weighted_precision = 0.0;
    let mut weighted_f1 = 0.0;
    for c in 0..k {
        let support: usize = cm.counts[c].iter().sum();
        let predicted: usize = (0..k).map(|r| cm.counts[r][c]).sum();
        let tp = cm.counts[c][c];
        let precision = if predicted > 0 {
            tp as f64 / predicted as f64
        } else {
            0.0
        };
        let recall = if support > 0 {
            tp as f64 / support as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        weighted_precision += precision * support as f64 / n;
        weighted_f1 += f1 * support as f64 / n;
        per_class.push(ClassMetrics {
            support,
            precision,
            recall,
            f1,
        });
    }
    let accuracy = cm.diagonal() as f64 / n;
    Ok(MetricsReport {
        accuracy,
        per_class,
        weighted_precision,
        weighted_recall: cm.diagonal() as f64 / n,
        weighted_f1,
    })
}

/// Result of one cross-validated evaluation.
#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

/// Train and test `spec` on every fold of `plan`, pooling all test
/// predictions into one confusion matrix before computing metrics.
///
/// With `fold_safe`, numeric columns are restandardized per fold using
/// training-rows statistics only (constant-in-fold columns are centered and
/// passed through); otherwise rows are used as given, matching a pipeline
/// that standardized globally up front.
pub fn cross_validate_opts(
    spec: &ClassifierSpec,
    d: &Dataset,
    plan: &FoldPlan,
    fold_safe: bool,
) -> Result<CvOutcome> {
    spec.validate()?;
    if plan.n_rows() != d.n_rows() {
        return Err(Error::Invalid(format!(
            "fold plan covers {} rows, dataset has {}",
            plan.n_rows(),
            d.n_rows()
        )));
    }
    let labels = d.label_ids();
    let mut cm = ConfusionMatrix::zeros(d.n_classes());
    for fold in 0..plan.k {
        let train_rows = plan.train_indices(fold);
        let test_rows = plan.test_indices(fold);
        if train_rows.is_empty() || test_rows.is_empty() {
            return Err(Error::Invalid(format!("fold {fold} has an empty side")));
        }
        let train_d = d.select_rows(&train_rows);
        let test_d = d.select_rows(&test_rows);
        let (train_d, test_d) = if fold_safe {
            let params = StandardizationParams::fit_lenient(&train_d)?;
            (params.apply(&train_d)?, params.apply(&test_d)?)
        } else {
            (train_d, test_d)
        };
        let x_train = train_d.feature_matrix();
        let y_train = train_d.label_ids();
        let model = train_on_matrix(spec, &x_train, &y_train, d.n_classes())?;
        let x_test = test_d.feature_matrix();
        for (pos, &row) in test_rows.iter().enumerate() {
            let (pred, _) = model.predict(x_test.row(pos))?;
            cm.add(labels[row], pred);
        }
    }
    let metrics = weighted_metrics(&cm)?;
    Ok(CvOutcome {
        confusion: cm,
        metrics,
    })
}

/// [`cross_validate_opts`] without per-fold restandardization.
pub fn cross_validate(spec: &ClassifierSpec, d: &Dataset, plan: &FoldPlan) -> Result<CvOutcome> {
    cross_validate_opts(spec, d, plan, false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub subset_name: String,
    pub subset_size: usize,
    pub algorithm: String,
    pub accuracy: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    /// 1-based rank over all rows: weighted F1 descending, accuracy breaks
    /// ties, original order breaks the rest.
    pub rank: usize,
}

/// The phase-two comparison: each attribute subset crossed with each
/// classifier, all evaluated under the same fold plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_subsets(
    d: &Dataset,
    subsets: &[(String, BTreeSet<usize>)],
    specs: &[ClassifierSpec],
    plan: &FoldPlan,
    fold_safe: bool,
) -> Result<ComparisonTable> {
    if subsets.is_empty() || specs.is_empty() {
        return Err(Error::Invalid("nothing to compare".into()));
    }
    let mut rows = Vec::new();
    for (name, attrs) in subsets {
        let view = d.restrict(attrs);
        if view.n_cols() == 0 {
            return Err(Error::Invalid(format!(
                "subset {name} selects no columns"
            )));
        }
        for spec in specs {
            let outcome = cross_validate_opts(spec, &view, plan, fold_safe)?;
            rows.push(ComparisonRow {
                subset_name: name.clone(),
                subset_size: attrs.len(),
                algorithm: spec.name(),
                accuracy: outcome.metrics.accuracy,
                weighted_precision: outcome.metrics.weighted_precision,
                weighted_recall: outcome.metrics.weighted_recall,
                weighted_f1: outcome.metrics.weighted_f1,
                rank: 0,
            });
        }
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        rows[b]
            .weighted_f1
            .total_cmp(&rows[a].weighted_f1)
            .then(rows[b].accuracy.total_cmp(&rows[a].accuracy))
            .then(a.cmp(&b))
    });
    for (rank0, &idx) in order.iter().enumerate() {
        rows[idx].rank = rank0 + 1;
    }
    Ok(ComparisonTable { rows })
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "subset,subset_size,algorithm,accuracy,weighted_precision,weighted_recall,weighted_f1,rank\n",
        );
        for r in &self.rows {
            out.push_str(&csv_record(&[
                r.subset_name.clone(),
                r.subset_size.to_string(),
                r.algorithm.clone(),
                fmt_float(r.accuracy),
                fmt_float(r.weighted_precision),
                fmt_float(r.weighted_recall),
                fmt_float(r.weighted_f1),
                r.rank.to_string(),
            ]));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from(
            "| subset | size | algorithm | accuracy | w. precision | w. recall | w. F1 | rank |\n\
             |---|---|---|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                r.subset_name,
                r.subset_size,
                r.algorithm,
                fmt_float(r.accuracy),
                fmt_float(r.weighted_precision),
                fmt_float(r.weighted_recall),
                fmt_float(r.weighted_f1),
                r.rank
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_two_class_example() {
        // Confusion matrix [[3,0],[1,0]]: class 0 precision 3/4, recall 1,
        // F1 6/7; class 1 all zero. Weighted F1 = (6/7)*(3/4) = 9/14.
        let cm = ConfusionMatrix {
            counts: vec![vec![3, 0], vec![1, 0]],
            n_classes: 2,
        };
        let m = weighted_metrics(&cm).unwrap();
        assert!((m.per_class[0].precision - 0.75).abs() < 1e-15);
        assert_eq!(m.per_class[0].recall, 1.0);
        assert!((m.per_class[0].f1 - 6.0 / 7.0).abs() < 1e-15);
        assert_eq!(m.per_class[1].precision, 0.0);
        assert_eq!(m.per_class[1].recall, 0.0);
        assert_eq!(m.per_class[1].f1, 0.0);
        assert!((m.weighted_f1 - 9.0 / 14.0).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.75);
        assert_eq!(m.weighted_recall, m.accuracy);
    }

    #[test]
    fn weighted_recall_equals_accuracy_exactly() {
        // Awkward supports on purpose; the identity must hold bitwise.
        let cm = ConfusionMatrix {
            counts: vec![vec![13, 5, 1], vec![2, 49, 0], vec![7, 3, 17]],
            n_classes: 3,
        };
        let m = weighted_metrics(&cm).unwrap();
        assert_eq!(m.weighted_recall, m.accuracy);
    }

    #[test]
    fn relabeling_permutes_per_class_metrics() {
        let cm = ConfusionMatrix {
            counts: vec![vec![5, 2], vec![1, 9]],
            n_classes: 2,
        };
        let swapped = ConfusionMatrix {
            counts: vec![vec![9, 1], vec![2, 5]],
            n_classes: 2,
        };
        let a = weighted_metrics(&cm).unwrap();
        let b = weighted_metrics(&swapped).unwrap();
        assert_eq!(a.accuracy, b.accuracy);
        assert_eq!(a.per_class[0], b.per_class[1]);
        assert_eq!(a.per_class[1], b.per_class[0]);
    }

    #[test]
    fn confusion_matrix_validates() {
        assert!(confusion_matrix(&[0, 1], &[0], 2).is_err());
        assert!(confusion_matrix(&[], &[], 2).is_err());
        assert!(confusion_matrix(&[0, 2], &[0, 0], 2).is_err());
        let cm = confusion_matrix(&[0, 1, 1], &[0, 1, 0], 2).unwrap();
        assert_eq!(cm.total(), 3);
        assert_eq!(cm.diagonal(), 2);
    }
}
