//! Metric identities and cross-validation properties. The central fact:
//! support-weighted recall collapses algebraically to the accuracy, and the
//! implementation preserves that equality bit for bit.

mod common;

use std::collections::BTreeSet;

use attrsel_core::{
    compare_subsets, confusion_matrix, cross_validate, make_folds, synth_generate,
    weighted_metrics, ClassifierSpec, ConfusionMatrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cm_from_counts(k: usize, counts: &[usize]) -> ConfusionMatrix {
    let mut cm = ConfusionMatrix::zeros(k);
    for t in 0..k {
        for p in 0..k {
            for _ in 0..counts[t * k + p] {
                cm.add(t, p);
            }
        }
    }
    cm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weighted_recall_is_the_accuracy_bit_for_bit(
        (k, counts) in (2usize..=6).prop_flat_map(|k| {
            (Just(k), proptest::collection::vec(0usize..40, k * k))
        }).prop_filter("needs at least one observation", |(_, c)| c.iter().sum::<usize>() > 0),
    ) {
        let cm = cm_from_counts(k, &counts);
        let m = weighted_metrics(&cm).unwrap();
        prop_assert_eq!(m.weighted_recall, m.accuracy);
        prop_assert_eq!(m.weighted_recall.to_bits(), m.accuracy.to_bits());
    }

    #[test]
    fn metric_ranges_and_zero_denominator_conventions(
        (k, counts) in (2usize..=5).prop_flat_map(|k| {
            (Just(k), proptest::collection::vec(0usize..25, k * k))
        }).prop_filter("needs at least one observation", |(_, c)| c.iter().sum::<usize>() > 0),
    ) {
        let cm = cm_from_counts(k, &counts);
        let m = weighted_metrics(&cm).unwrap();
        for (c, pc) in m.per_class.iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(&pc.precision));
            prop_assert!((0.0..=1.0).contains(&pc.recall));
            prop_assert!((0.0..=1.0).contains(&pc.f1));
            let support: usize = (0..k).map(|p| counts[c * k + p]).sum();
            prop_assert_eq!(pc.support, support);
            if support == 0 {
                prop_assert_eq!(pc.recall, 0.0);
                prop_assert_eq!(pc.f1, 0.0);
            }
            let predicted: usize = (0..k).map(|t| counts[t * k + c]).sum();
            if predicted == 0 {
                prop_assert_eq!(pc.precision, 0.0);
            }
        }
        prop_assert!((0.0..=1.0).contains(&m.weighted_precision));
        prop_assert!((0.0..=1.0).contains(&m.weighted_f1));
        // F1 is bounded above by the harmonic-mean structure: never past
        // either weighted ingredient's ceiling.
        prop_assert!(m.weighted_f1 <= 1.0);
    }

    #[test]
    fn merge_is_entrywise_addition(
        (k, a, b) in (2usize..=4).prop_flat_map(|k| {
            (
                Just(k),
                proptest::collection::vec(0usize..10, k * k),
                proptest::collection::vec(0usize..10, k * k),
            )
        }),
    ) {
        let mut left = cm_from_counts(k, &a);
        let right = cm_from_counts(k, &b);
        left.merge(&right);
        for t in 0..k {
            for p in 0..k {
                prop_assert_eq!(left.counts[t][p], a[t * k + p] + b[t * k + p]);
            }
        }
    }
}

/// The binary worked example, every value derived by hand as a fraction:
/// cm = [[40, 10], [5, 45]].
///   precision_0 = 40/45 = 8/9, recall_0 = 40/50 = 4/5, F1_0 = 16/19
///   precision_1 = 45/55 = 9/11, recall_1 = 45/50 = 9/10, F1_1 = 6/7
///   weighted F1 = (50·16/19 + 50·6/7)/100 = 113/133
#[test]
fn two_class_worked_example_to_twelve_decimals() {
    let mut cm = ConfusionMatrix::zeros(2);
    for _ in 0..40 {
        cm.add(0, 0);
    }
    for _ in 0..10 {
        cm.add(0, 1);
    }
    for _ in 0..5 {
        cm.add(1, 0);
    }
    for _ in 0..45 {
        cm.add(1, 1);
    }
    let m = weighted_metrics(&cm).unwrap();
    let tol = 1e-12;
    assert!((m.per_class[0].precision - 8.0 / 9.0).abs() <= tol);
    assert!((m.per_class[0].recall - 0.8).abs() <= tol);
    assert!((m.per_class[0].f1 - 16.0 / 19.0).abs() <= tol);
    assert!((m.per_class[1].precision - 9.0 / 11.0).abs() <= tol);
    assert!((m.per_class[1].recall - 0.9).abs() <= tol);
    assert!((m.per_class[1].f1 - 6.0 / 7.0).abs() <= tol);
    assert!((m.weighted_f1 - 113.0 / 133.0).abs() <= tol);
    assert!((m.weighted_precision - 169.0 / 198.0).abs() <= tol);
    assert!((m.accuracy - 0.85).abs() <= tol);
    assert_eq!(m.weighted_recall, m.accuracy);
}

#[test]
fn confusion_matrix_rejects_shape_and_range_errors() {
    assert!(confusion_matrix(&[0, 1], &[0], 2).is_err());
    assert!(confusion_matrix(&[], &[], 2).is_err());
    assert!(confusion_matrix(&[0, 2], &[0, 1], 2).is_err());
    let cm = confusion_matrix(&[0, 1, 1], &[0, 1, 0], 2).unwrap();
    assert_eq!(cm.total(), 3);
    assert_eq!(cm.diagonal(), 2);
}

#[test]
fn cross_validation_pools_every_row_exactly_once() {
    let d = synth_generate(90, 2, 3, 3, 41).unwrap();
    let plan = make_folds(d.labels(), 5, 7, true).unwrap();
    let out = cross_validate(&ClassifierSpec::knn_default(), &d, &plan).unwrap();
    assert_eq!(out.confusion.total(), d.n_rows());
    // Row-class marginals of the pooled matrix equal the dataset's counts.
    let counts = d.class_counts();
    for (c, &n) in counts.iter().enumerate() {
        let support: usize = out.confusion.counts[c].iter().sum();
        assert_eq!(support, n);
    }
}

#[test]
fn cross_validation_is_deterministic_per_plan() {
    let d = synth_generate(80, 2, 4, 2, 9).unwrap();
    let plan = make_folds(d.labels(), 4, 3, true).unwrap();
    for spec in ClassifierSpec::default_panel() {
        let a = cross_validate(&spec, &d, &plan).unwrap();
        let b = cross_validate(&spec, &d, &plan).unwrap();
        assert_eq!(a.confusion.counts, b.confusion.counts, "{}", spec.name());
        assert_eq!(a.metrics.weighted_f1.to_bits(), b.metrics.weighted_f1.to_bits());
    }
}

#[test]
fn comparison_table_ranks_by_weighted_f1() {
    let d = synth_generate(120, 3, 4, 3, 15).unwrap();
    let plan = make_folds(d.labels(), 5, 11, true).unwrap();
    let planted: BTreeSet<usize> = d.planted().unwrap().iter().copied().collect();
    let all: BTreeSet<usize> = (0..d.n_attributes()).collect();
    let subsets = vec![("planted".to_string(), planted), ("all".to_string(), all)];
    let specs = [ClassifierSpec::knn_default(), ClassifierSpec::OneRule];
    let table = compare_subsets(&d, &subsets, &specs, &plan, true).unwrap();
    assert_eq!(table.rows.len(), 4);
    let mut ranks: Vec<usize> = table.rows.iter().map(|r| r.rank).collect();
    ranks.sort_unstable();
    assert_eq!(ranks, vec![1, 2, 3, 4]);
    // Rank order is exactly weighted-F1 descending with the documented
    // tie-breaks.
    let mut by_rank = table.rows.clone();
    by_rank.sort_by_key(|r| r.rank);
    for pair in by_rank.windows(2) {
        assert!(
            pair[0].weighted_f1 >= pair[1].weighted_f1
                || (pair[0].weighted_f1 == pair[1].weighted_f1
                    && pair[0].accuracy >= pair[1].accuracy)
        );
    }
    let csv = table.to_csv();
    assert_eq!(csv.lines().count(), 5);
}

/// The identity holds on pooled fold outputs as well, not just synthetic
/// tables: run a real CV and check the headline columns coincide.
#[test]
fn pooled_cv_metrics_keep_recall_equal_to_accuracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..5 {
        let rows = rng.random_range(60..140);
        let d = synth_generate(rows, 2, 3, rng.random_range(2..=4), rng.random())
            .unwrap();
        let plan = make_folds(d.labels(), 5, rng.random(), true).unwrap();
        let out = cross_validate(&ClassifierSpec::tree_default(), &d, &plan).unwrap();
        assert_eq!(
            out.metrics.weighted_recall.to_bits(),
            out.metrics.accuracy.to_bits(),
            "trial {trial}"
        );
    }
}
