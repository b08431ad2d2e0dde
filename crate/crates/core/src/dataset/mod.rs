//! Dataset model: parent attributes, typed columns, class labels.
//!
//! Attributes are the unit of selection and voting. An attribute usually owns
//! one column, but one-hot encoding expands a nominal attribute into several
//! indicator columns that all keep the parent's identity, so subsets and
//! rankings stay expressed in terms of the original attributes.

mod folds;
mod ingest;
mod preprocess;
mod schema;
mod synth;

pub use folds::{make_folds, FoldPlan};
pub use ingest::{load_csv, load_csv_with_stats, IngestStats};
pub use preprocess::{one_hot_encode, standardize, ConstantColumnPolicy, StandardizationParams};
pub use schema::{AttributeSchema, ColumnRole, SchemaColumn};
pub use synth::synth_generate;

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Post-graduation income band, the classification target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IncomeClass {
    VeryLow,
    Low,
    Middle,
    High,
}

impl IncomeClass {
    pub const ALL: [IncomeClass; 4] = [
        IncomeClass::VeryLow,
        IncomeClass::Low,
        IncomeClass::Middle,
        IncomeClass::High,
    ];

    pub fn index(self) -> usize {
        match self {
            IncomeClass::VeryLow => 0,
            IncomeClass::Low => 1,
            IncomeClass::Middle => 2,
            IncomeClass::High => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<IncomeClass> {
        IncomeClass::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            IncomeClass::VeryLow => "very_low",
            IncomeClass::Low => "low",
            IncomeClass::Middle => "middle",
            IncomeClass::High => "high",
        }
    }

    /// A value inside the band, used when exporting labeled rows so the
    /// target survives a round trip through [`discretize_income`].
    pub fn representative_income(self) -> f64 {
        match self {
            IncomeClass::VeryLow => 20_000.0,
            IncomeClass::Low => 30_000.0,
            IncomeClass::Middle => 45_000.0,
            IncomeClass::High => 60_000.0,
        }
    }
}

impl std::fmt::Display for IncomeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Map a mean income in dollars to its band. Bands are half-open on the
/// right: 25,000 falls in `Low`, 50,000 in `High`.
pub fn discretize_income(income: f64) -> Result<IncomeClass> {
    if !income.is_finite() {
        return Err(Error::Data(format!("income is not finite: {income}")));
    }
    if income < 0.0 {
        return Err(Error::Data(format!("income is negative: {income}")));
    }
    Ok(if income < 25_000.0 {
        IncomeClass::VeryLow
    } else if income < 37_500.0 {
        IncomeClass::Low
    } else if income < 50_000.0 {
        IncomeClass::Middle
    } else {
        IncomeClass::High
    })
}

/// Thematic grouping of attributes, carried through to reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttributeGroup {
    School,
    Admissions,
    Cost,
    Student,
    Family,
}

impl AttributeGroup {
    pub const ALL: [AttributeGroup; 5] = [
        AttributeGroup::School,
        AttributeGroup::Admissions,
        AttributeGroup::Cost,
        AttributeGroup::Student,
        AttributeGroup::Family,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttributeGroup::School => "school",
            AttributeGroup::Admissions => "admissions",
            AttributeGroup::Cost => "cost",
            AttributeGroup::Student => "student",
            AttributeGroup::Family => "family",
        }
    }

    pub fn parse(s: &str) -> Result<AttributeGroup> {
        match s.trim().to_ascii_lowercase().as_str() {
            "school" => Ok(AttributeGroup::School),
            "admissions" => Ok(AttributeGroup::Admissions),
            "cost" => Ok(AttributeGroup::Cost),
            "student" => Ok(AttributeGroup::Student),
            "family" => Ok(AttributeGroup::Family),
            other => Err(Error::Schema(format!("unknown attribute group: {other}"))),
        }
    }
}

impl std::fmt::Display for AttributeGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A selectable attribute. Index in `Dataset::attributes` is its id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeInfo {
    pub name: String,
    pub group: AttributeGroup,
}

/// Column payload. Nominal columns intern category strings; codes index into
/// `categories` in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Nominal {
        codes: Vec<u32>,
        categories: Vec<String>,
    },
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Nominal { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value as f64: the number itself, or the nominal code.
    pub fn value(&self, row: usize) -> f64 {
        match self {
            ColumnData::Numeric(v) => v[row],
            ColumnData::Nominal { codes, .. } => codes[row] as f64,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ColumnData::Numeric(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Id of the owning attribute.
    pub attr: usize,
    pub data: ColumnData,
}

/// Dense row-major feature matrix extracted from a dataset.
#[derive(Debug, Clone)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "matrix shape mismatch");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// An immutable table of columns plus per-row class labels.
///
/// Transformations (`standardize`, `one_hot_encode`, `restrict`,
/// `select_rows`) build new datasets and preserve attribute identity and
/// provenance. `n_classes` is fixed at construction so per-fold views keep
/// the full class space even when a class is absent from their rows.
#[derive(Debug, Clone)]
pub struct Dataset {
    attributes: Vec<AttributeInfo>,
    columns: Vec<Column>,
    labels: Vec<IncomeClass>,
    n_classes: usize,
    target_name: String,
    planted: Option<Vec<usize>>,
}

impl Dataset {
    pub fn new(
        attributes: Vec<AttributeInfo>,
        columns: Vec<Column>,
        labels: Vec<IncomeClass>,
        n_classes: usize,
        target_name: impl Into<String>,
    ) -> Result<Dataset> {
        if n_classes < 2 || n_classes > IncomeClass::ALL.len() {
            return Err(Error::Invalid(format!(
                "n_classes must be between 2 and {}, got {n_classes}",
                IncomeClass::ALL.len()
            )));
        }
        let n_rows = labels.len();
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.data.len() != n_rows {
                return Err(Error::Invalid(format!(
                    "column {} has {} rows, labels have {n_rows}",
                    c.name,
                    c.data.len()
                )));
            }
            if c.attr >= attributes.len() {
                return Err(Error::Invalid(format!(
                    "column {} references attribute {} of {}",
                    c.name,
                    c.attr,
                    attributes.len()
                )));
            }
            if !seen.insert(c.name.clone()) {
                return Err(Error::Schema(format!("duplicate column name: {}", c.name)));
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if l.index() >= n_classes {
                return Err(Error::Invalid(format!(
                    "row {i}: label {l} outside the {n_classes}-class space"
                )));
            }
        }
        Ok(Dataset {
            attributes,
            columns,
            labels,
            n_classes,
            target_name: target_name.into(),
            planted: None,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn attributes(&self) -> &[AttributeInfo] {
        &self.attributes
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn labels(&self) -> &[IncomeClass] {
        &self.labels
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    /// Class label of each row as an index into `0..n_classes`.
    pub fn label_ids(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.index()).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for l in &self.labels {
            counts[l.index()] += 1;
        }
        counts
    }

    /// Fraction of rows in the most frequent class; ties resolve to the
    /// lowest class id but the fraction is the same either way.
    pub fn majority_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        let max = self.class_counts().into_iter().max().unwrap_or(0);
        max as f64 / self.labels.len() as f64
    }

    pub fn with_planted(mut self, planted: Vec<usize>) -> Dataset {
        self.planted = Some(planted);
        self
    }

    /// Attribute ids planted as informative by the synthetic generator.
    pub fn planted(&self) -> Option<&[usize]> {
        self.planted.as_deref()
    }

    /// Attribute ids that still own at least one column, ascending.
    pub fn present_attributes(&self) -> Vec<usize> {
        let ids: BTreeSet<usize> = self.columns.iter().map(|c| c.attr).collect();
        ids.into_iter().collect()
    }

    /// Column indices owned by one attribute, ascending.
    pub fn attr_columns(&self, attr: usize) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.attr == attr)
            .map(|(i, _)| i)
            .collect()
    }

    /// Keep only columns owned by attributes in `attrs`. Attribute ids and
    /// labels are unchanged, so subsets remain comparable across views.
    pub fn restrict(&self, attrs: &BTreeSet<usize>) -> Dataset {
        let columns = self
            .columns
            .iter()
            .filter(|c| attrs.contains(&c.attr))
            .cloned()
            .collect();
        Dataset {
            attributes: self.attributes.clone(),
            columns,
            labels: self.labels.clone(),
            n_classes: self.n_classes,
            target_name: self.target_name.clone(),
            planted: self.planted.clone(),
        }
    }

    /// New dataset holding the given rows in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                attr: c.attr,
                data: match &c.data {
                    ColumnData::Numeric(v) => {
                        ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect())
                    }
                    ColumnData::Nominal { codes, categories } => ColumnData::Nominal {
                        codes: rows.iter().map(|&r| codes[r]).collect(),
                        categories: categories.clone(),
                    },
                },
            })
            .collect();
        Dataset {
            attributes: self.attributes.clone(),
            columns,
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            n_classes: self.n_classes,
            target_name: self.target_name.clone(),
            planted: self.planted.clone(),
        }
    }

    /// Row-major matrix of all columns; nominal columns contribute their
    /// integer codes. Classifiers normally see one-hot encoded data, where
    /// every column is numeric.
    pub fn feature_matrix(&self) -> Matrix {
        let rows = self.n_rows();
        let cols = self.n_cols();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in self.columns.iter().enumerate() {
            match &c.data {
                ColumnData::Numeric(v) => {
                    for (i, &x) in v.iter().enumerate() {
                        data[i * cols + j] = x;
                    }
                }
                ColumnData::Nominal { codes, .. } => {
                    for (i, &code) in codes.iter().enumerate() {
                        data[i * cols + j] = code as f64;
                    }
                }
            }
        }
        Matrix::new(rows, cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        let attrs = vec![
            AttributeInfo {
                name: "a".into(),
                group: AttributeGroup::School,
            },
            AttributeInfo {
                name: "b".into(),
                group: AttributeGroup::Cost,
            },
        ];
        let cols = vec![
            Column {
                name: "a".into(),
                attr: 0,
                data: ColumnData::Numeric(vec![1.0, 2.0, 3.0]),
            },
            Column {
                name: "b".into(),
                attr: 1,
                data: ColumnData::Nominal {
                    codes: vec![0, 1, 0],
                    categories: vec!["x".into(), "y".into()],
                },
            },
        ];
        let labels = vec![IncomeClass::VeryLow, IncomeClass::Low, IncomeClass::VeryLow];
        Dataset::new(attrs, cols, labels, 2, "income").unwrap()
    }

    #[test]
    fn income_bands_are_half_open() {
        assert_eq!(discretize_income(0.0).unwrap(), IncomeClass::VeryLow);
        assert_eq!(discretize_income(24_999.99).unwrap(), IncomeClass::VeryLow);
        assert_eq!(discretize_income(25_000.0).unwrap(), IncomeClass::Low);
        assert_eq!(discretize_income(37_499.0).unwrap(), IncomeClass::Low);
        assert_eq!(discretize_income(37_500.0).unwrap(), IncomeClass::Middle);
        assert_eq!(discretize_income(49_999.0).unwrap(), IncomeClass::Middle);
        assert_eq!(discretize_income(50_000.0).unwrap(), IncomeClass::High);
        assert_eq!(discretize_income(1e9).unwrap(), IncomeClass::High);
        assert!(discretize_income(-1.0).is_err());
        assert!(discretize_income(f64::NAN).is_err());
        assert!(discretize_income(f64::INFINITY).is_err());
    }

    #[test]
    fn representative_incomes_round_trip() {
        for c in IncomeClass::ALL {
            assert_eq!(discretize_income(c.representative_income()).unwrap(), c);
        }
    }

    #[test]
    fn restrict_keeps_attribute_ids() {
        let d = tiny();
        let keep: BTreeSet<usize> = [1].into_iter().collect();
        let r = d.restrict(&keep);
        assert_eq!(r.n_cols(), 1);
        assert_eq!(r.columns()[0].attr, 1);
        assert_eq!(r.n_attributes(), 2);
        assert_eq!(r.present_attributes(), vec![1]);
    }

    #[test]
    fn select_rows_reorders_and_duplicates() {
        let d = tiny();
        let s = d.select_rows(&[2, 0, 0]);
        assert_eq!(s.n_rows(), 3);
        assert_eq!(s.feature_matrix().get(0, 0), 3.0);
        assert_eq!(s.feature_matrix().get(1, 0), 1.0);
        assert_eq!(s.feature_matrix().get(2, 0), 1.0);
        assert_eq!(s.labels()[0], IncomeClass::VeryLow);
    }

    #[test]
    fn feature_matrix_uses_codes_for_nominal() {
        let d = tiny();
        let m = d.feature_matrix();
        assert_eq!(m.get(1, 1), 1.0);
        assert_eq!(m.get(2, 1), 0.0);
    }

    #[test]
    fn new_rejects_ragged_columns() {
        let attrs = vec![AttributeInfo {
            name: "a".into(),
            group: AttributeGroup::School,
        }];
        let cols = vec![Column {
            name: "a".into(),
            attr: 0,
            data: ColumnData::Numeric(vec![1.0]),
        }];
        let labels = vec![IncomeClass::VeryLow, IncomeClass::Low];
        assert!(Dataset::new(attrs, cols, labels, 2, "income").is_err());
    }

    #[test]
    fn majority_fraction_counts_the_modal_class() {
        let d = tiny();
        assert!((d.majority_fraction() - 2.0 / 3.0).abs() < 1e-15);
    }
}
