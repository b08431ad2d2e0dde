//! Synthetic benchmark data with planted informative attributes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{AttributeGroup, AttributeInfo, Column, ColumnData, Dataset, IncomeClass};
use crate::error::{Error, Result};

/// Spacing between adjacent class centers on an informative attribute.
const CENTER_STEP: f64 = 2.0;
/// Half-width of the uniform spread around each center. Wider than the
/// center gap, so one attribute alone leaves substantial class overlap and
/// every additional informative attribute still raises accuracy.
const SPREAD: f64 = 2.0;

/// Generate a labeled table with `n_informative` attributes that carry class
/// signal and `n_noise` attributes that are label-independent.
///
/// Labels are near-uniform over `n_classes` (each class occurs at least
/// once). Informative attribute `j` draws from a uniform distribution whose
/// center moves linearly with the class, with alternating sign so signals
/// point in different directions; noise attributes draw from a fixed uniform
/// distribution regardless of class. Attribute positions are shuffled and
/// the informative ids are recorded in the dataset's provenance, ascending.
///
/// Same arguments, same table: all draws come from one seeded stream.
pub fn synth_generate(
    n_rows: usize,
    n_informative: usize,
    n_noise: usize,
    n_classes: usize,
    seed: u64,
) -> Result<Dataset> {
    if n_classes < 2 || n_classes > IncomeClass::ALL.len() {
        return Err(Error::Invalid(format!(
            "n_classes must be between 2 and {}, got {n_classes}",
            IncomeClass::ALL.len()
        )));
    }
    if n_informative == 0 {
        return Err(Error::Invalid("need at least one informative attribute".into()));
    }
    if n_rows < n_classes {
        return Err(Error::Invalid(format!(
            "{n_rows} rows cannot cover {n_classes} classes"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n_informative + n_noise;

    // Labels: first one of each class, rest uniform, then shuffled.
    let mut labels: Vec<usize> = (0..n_classes).collect();
    labels.extend((n_classes..n_rows).map(|_| rng.random_range(0..n_classes)));
    labels.shuffle(&mut rng);

    // Shuffled attribute positions; the first n_informative slots host the
    // planted attributes.
    let mut positions: Vec<usize> = (0..total).collect();
    positions.shuffle(&mut rng);
    let mut informative_at = vec![None; total];
    for (j, &pos) in positions.iter().take(n_informative).enumerate() {
        informative_at[pos] = Some(j);
    }
    let mut planted: Vec<usize> = positions[..n_informative].to_vec();
    planted.sort_unstable();

    let offset = (n_classes - 1) as f64 / 2.0;
    let width = total.to_string().len().max(2);
    let mut attributes = Vec::with_capacity(total);
    let mut columns = Vec::with_capacity(total);
    for pos in 0..total {
        let name = format!("a{pos:0width$}");
        attributes.push(AttributeInfo {
            name: name.clone(),
            group: AttributeGroup::ALL[pos % AttributeGroup::ALL.len()],
        });
        let values: Vec<f64> = match informative_at[pos] {
            Some(j) => {
                let dir = if j % 2 == 0 { 1.0 } else { -1.0 };
                labels
                    .iter()
                    .map(|&c| {
                        let center = dir * CENTER_STEP * (c as f64 - offset);
                        center + rng.random_range(-SPREAD..SPREAD)
                    })
                    .collect()
            }
            None => (0..n_rows).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        columns.push(Column {
            name,
            attr: pos,
            data: ColumnData::Numeric(values),
        });
    }

    let class_labels: Vec<IncomeClass> = labels
        .iter()
        .map(|&c| IncomeClass::from_index(c).expect("class index in range"))
        .collect();
    Ok(Dataset::new(attributes, columns, class_labels, n_classes, "mean_income")?
        .with_planted(planted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = synth_generate(50, 3, 4, 3, 11).unwrap();
        let b = synth_generate(50, 3, 4, 3, 11).unwrap();
        let c = synth_generate(50, 3, 4, 3, 12).unwrap();
        assert_eq!(a.planted(), b.planted());
        assert_eq!(a.feature_matrix().data(), b.feature_matrix().data());
        assert_eq!(a.labels(), b.labels());
        assert_ne!(a.feature_matrix().data(), c.feature_matrix().data());
    }

    #[test]
    fn covers_all_classes_and_shapes() {
        let d = synth_generate(20, 2, 5, 4, 3).unwrap();
        assert_eq!(d.n_rows(), 20);
        assert_eq!(d.n_cols(), 7);
        assert_eq!(d.n_attributes(), 7);
        assert!(d.class_counts().iter().all(|&c| c > 0));
        let planted = d.planted().unwrap();
        assert_eq!(planted.len(), 2);
        assert!(planted.windows(2).all(|w| w[0] < w[1]));
        assert!(planted.iter().all(|&p| p < 7));
    }

    #[test]
    fn informative_columns_track_class_and_noise_does_not() {
        let d = synth_generate(2000, 1, 1, 2, 5).unwrap();
        let planted = d.planted().unwrap()[0];
        let noise = if planted == 0 { 1 } else { 0 };
        let m = d.feature_matrix();
        let mean_by = |col: usize, class: usize| -> f64 {
            let rows: Vec<usize> = d
                .labels()
                .iter()
                .enumerate()
                .filter(|(_, l)| l.index() == class)
                .map(|(i, _)| i)
                .collect();
            rows.iter().map(|&r| m.get(r, col)).sum::<f64>() / rows.len() as f64
        };
        let gap_planted = (mean_by(planted, 0) - mean_by(planted, 1)).abs();
        let gap_noise = (mean_by(noise, 0) - mean_by(noise, 1)).abs();
        assert!(gap_planted > 1.5, "planted gap {gap_planted}");
        assert!(gap_noise < 0.3, "noise gap {gap_noise}");
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert!(synth_generate(10, 0, 3, 2, 1).is_err());
        assert!(synth_generate(10, 2, 2, 1, 1).is_err());
        assert!(synth_generate(10, 2, 2, 5, 1).is_err());
        assert!(synth_generate(3, 2, 2, 4, 1).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_rows_and_labels() {
        use crate::dataset::schema::{AttributeSchema, ColumnRole, SchemaColumn};
        let d = synth_generate(30, 2, 3, 4, 9).unwrap();
        let csv_text = d.to_csv_string();
        let mut path = std::env::temp_dir();
        path.push(format!("synth-roundtrip-{}.csv", std::process::id()));
        std::fs::write(&path, &csv_text).unwrap();

        let mut cols: Vec<SchemaColumn> = d
            .columns()
            .iter()
            .map(|c| SchemaColumn {
                name: c.name.clone(),
                role: ColumnRole::Numeric,
                group: AttributeGroup::School,
            })
            .collect();
        cols.push(SchemaColumn {
            name: "mean_income".into(),
            role: ColumnRole::Target,
            group: AttributeGroup::Family,
        });
        let schema = AttributeSchema::new(cols);
        let back = crate::dataset::load_csv(&path, &schema).unwrap();
        std::fs::remove_file(&path).ok();

        assert_eq!(back.n_rows(), d.n_rows());
        assert_eq!(back.labels(), d.labels());
        assert_eq!(back.feature_matrix().data(), d.feature_matrix().data());
    }
}
