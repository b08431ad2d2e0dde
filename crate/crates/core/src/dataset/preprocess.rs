//! Standardization and one-hot encoding.

use std::collections::HashMap;

use crate::dataset::{Column, ColumnData, Dataset};
use crate::error::{Error, Result};

/// What to do with numeric columns whose sample standard deviation is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantColumnPolicy {
    /// Fail loudly; constants usually mean a broken extract.
    Reject,
    /// Remove the column; its attribute stays registered but unused.
    Drop,
}

/// Per-column centering and scale, keyed by column name so parameters fitted
/// on one row subset can be applied to another.
#[derive(Debug, Clone)]
pub struct StandardizationParams {
    pub per_column: Vec<(String, f64, f64)>,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

impl StandardizationParams {
    /// Fit mean and sample (n-1) standard deviation of every numeric column.
    /// Constant columns are recorded with sd 0; policy is applied later.
    pub fn fit(d: &Dataset) -> Result<StandardizationParams> {
        if d.n_rows() == 0 {
            return Err(Error::Invalid("cannot standardize an empty dataset".into()));
        }
        let per_column = d
            .columns()
            .iter()
            .filter_map(|c| match &c.data {
                ColumnData::Numeric(v) => {
                    let (m, s) = mean_sd(v);
                    Some((c.name.clone(), m, s))
                }
                ColumnData::Nominal { .. } => None,
            })
            .collect();
        Ok(StandardizationParams { per_column })
    }

    /// Same as [`fit`], but constant columns get scale 1 so they are centered
    /// and passed through. Used for per-fold standardization, where a column
    /// may be constant inside a training fold while informative globally;
    /// dropping it there would silently change the attribute space.
    pub fn fit_lenient(d: &Dataset) -> Result<StandardizationParams> {
        let mut p = Self::fit(d)?;
        for (_, _, sd) in p.per_column.iter_mut() {
            if *sd == 0.0 {
                *sd = 1.0;
            }
        }
        Ok(p)
    }

    /// Transform every numeric column of `d` as (x - mean) / sd.
    ///
    /// Every numeric column must have a parameter entry with sd > 0; nominal
    /// columns pass through.
    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        let lookup: HashMap<&str, (f64, f64)> = self
            .per_column
            .iter()
            .map(|(name, m, s)| (name.as_str(), (*m, *s)))
            .collect();
        let mut columns = Vec::with_capacity(d.n_cols());
        for c in d.columns() {
            let data = match &c.data {
                ColumnData::Numeric(v) => {
                    let (m, s) = *lookup.get(c.name.as_str()).ok_or_else(|| {
                        Error::Invalid(format!("no standardization parameters for column {}", c.name))
                    })?;
                    if s <= 0.0 {
                        return Err(Error::Invalid(format!(
                            "column {} has non-positive scale {s}",
                            c.name
                        )));
                    }
                    ColumnData::Numeric(v.iter().map(|x| (x - m) / s).collect())
                }
                nominal => nominal.clone(),
            };
            columns.push(Column {
                name: c.name.clone(),
                attr: c.attr,
                data,
            });
        }
        let mut out = Dataset::new(
            d.attributes().to_vec(),
            columns,
            d.labels().to_vec(),
            d.n_classes(),
            d.target_name(),
        )?;
        if let Some(p) = d.planted() {
            out = out.with_planted(p.to_vec());
        }
        Ok(out)
    }
}

/// Z-score every numeric column using its own mean and sample standard
/// deviation. Nominal columns are untouched. Constant numeric columns are
/// rejected or dropped per `policy`.
pub fn standardize(
    d: &Dataset,
    policy: ConstantColumnPolicy,
) -> Result<(Dataset, StandardizationParams)> {
    let fitted = StandardizationParams::fit(d)?;
    let constants: Vec<&str> = fitted
        .per_column
        .iter()
        .filter(|(_, _, sd)| *sd == 0.0)
        .map(|(name, _, _)| name.as_str())
        .collect();
    if !constants.is_empty() && policy == ConstantColumnPolicy::Reject {
        return Err(Error::Data(format!(
            "constant numeric columns: {}",
            constants.join(", ")
        )));
    }

    let keep: Vec<Column> = d
        .columns()
        .iter()
        .filter(|c| !(c.data.is_numeric() && constants.contains(&c.name.as_str())))
        .cloned()
        .collect();
    let params = StandardizationParams {
        per_column: fitted
            .per_column
            .into_iter()
            .filter(|(_, _, sd)| *sd > 0.0)
            .collect(),
    };
    let mut trimmed = Dataset::new(
        d.attributes().to_vec(),
        keep,
        d.labels().to_vec(),
        d.n_classes(),
        d.target_name(),
    )?;
    if let Some(p) = d.planted() {
        trimmed = trimmed.with_planted(p.to_vec());
    }
    let out = params.apply(&trimmed)?;
    Ok((out, params))
}

/// Expand each nominal column into one indicator column per category, named
/// `<column>=<category>`. Indicators inherit the parent attribute id, so
/// selection still operates on whole attributes. Numeric columns and column
/// order are preserved (indicators replace their source column in place).
pub fn one_hot_encode(d: &Dataset) -> Result<Dataset> {
    let mut columns = Vec::new();
    for c in d.columns() {
        match &c.data {
            ColumnData::Numeric(_) => columns.push(c.clone()),
            ColumnData::Nominal { codes, categories } => {
                for (cat_idx, cat) in categories.iter().enumerate() {
                    let indicator: Vec<f64> = codes
                        .iter()
                        .map(|&code| if code as usize == cat_idx { 1.0 } else { 0.0 })
                        .collect();
                    columns.push(Column {
                        name: format!("{}={}", c.name, cat),
                        attr: c.attr,
                        data: ColumnData::Numeric(indicator),
                    });
                }
            }
        }
    }
    let mut out = Dataset::new(
        d.attributes().to_vec(),
        columns,
        d.labels().to_vec(),
        d.n_classes(),
        d.target_name(),
    )?;
    if let Some(p) = d.planted() {
        out = out.with_planted(p.to_vec());
    }
    Ok(out)
}
