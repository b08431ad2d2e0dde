//! Filter-style attribute scorers: information gain, gain ratio, chi-square,
//! OneR, and ReliefF, plus the equal-frequency binning they share and the
//! per-attribute ranking entry point.
//!
//! Discrete scorers see numeric columns through equal-frequency bins and
//! nominal columns through their category codes. Scores are computed per
//! column and rolled up to the owning attribute by maximum, so a one-hot
//! expanded attribute is ranked by its strongest indicator.

mod relief;

pub use relief::{relief_weights, relief_weights_k, RELIEF_K};

use crate::dataset::{ColumnData, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterMethod {
    OneR,
    ReliefF,
    ChiSquare,
    GainRatio,
    InfoGain,
}

impl FilterMethod {
    pub const ALL: [FilterMethod; 5] = [
        FilterMethod::OneR,
        FilterMethod::ReliefF,
        FilterMethod::ChiSquare,
        FilterMethod::GainRatio,
        FilterMethod::InfoGain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterMethod::OneR => "oner",
            FilterMethod::ReliefF => "relieff",
            FilterMethod::ChiSquare => "chi_square",
            FilterMethod::GainRatio => "gain_ratio",
            FilterMethod::InfoGain => "info_gain",
        }
    }

    pub fn parse(s: &str) -> Result<FilterMethod> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oner" | "one_r" => Ok(FilterMethod::OneR),
            "relieff" | "relief" => Ok(FilterMethod::ReliefF),
            "chi_square" | "chi2" | "chisquare" => Ok(FilterMethod::ChiSquare),
            "gain_ratio" | "gainratio" => Ok(FilterMethod::GainRatio),
            "info_gain" | "infogain" => Ok(FilterMethod::InfoGain),
            other => Err(Error::Config(format!("unknown filter method: {other}"))),
        }
    }
}

impl std::fmt::Display for FilterMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinningStrategy {
    EqualFrequency,
}

/// How numeric columns are discretized for the discrete scorers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinningSpec {
    pub n_bins: usize,
    pub strategy: BinningStrategy,
}

impl Default for BinningSpec {
    fn default() -> Self {
        BinningSpec {
            n_bins: 10,
            strategy: BinningStrategy::EqualFrequency,
        }
    }
}

/// Cut points for equal-frequency binning: the i/k quantile values of the
/// sorted data, deduplicated. A value lands in bin `#cuts strictly below it`,
/// so ties at a cut fall into the lower bin. A final cut equal to the
/// column maximum is dropped (it would close a bin nothing can reach), so
/// every bin between consecutive cuts holds at least one data value. Heavy
/// ties can therefore leave no usable cut at all, collapsing the column to
/// a single bin.
pub fn equal_freq_cuts(values: &[f64], n_bins: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Invalid("cannot bin an empty column".into()));
    }
    if n_bins < 2 {
        return Err(Error::Invalid(format!("need at least 2 bins, got {n_bins}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("cannot bin non-finite values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::Data("constant column cannot be binned".into()));
    }
    let n = sorted.len();
    let mut cuts = Vec::new();
    for i in 1..n_bins {
        let idx = (i * n) / n_bins;
        if idx == 0 {
            continue;
        }
        let cut = sorted[idx - 1];
        if cuts.last() != Some(&cut) {
            cuts.push(cut);
        }
    }
    if cuts.last() == Some(&sorted[n - 1]) {
        cuts.pop();
    }
    Ok(cuts)
}

/// A numeric column discretized into equal-frequency bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedColumn {
    pub bins: Vec<u32>,
    pub n_bins: usize,
    pub cuts: Vec<f64>,
}

/// Discretize `values` per `spec`. Bin ids are dense: every id in
/// `0..n_bins` occurs in the output (each cut is itself a data value, so the
/// interval it closes is never empty).
pub fn bin_numeric(values: &[f64], spec: &BinningSpec) -> Result<BinnedColumn> {
    let BinningStrategy::EqualFrequency = spec.strategy;
    let cuts = equal_freq_cuts(values, spec.n_bins)?;
    let bins = values
        .iter()
        .map(|&v| cuts.iter().take_while(|&&c| c < v).count() as u32)
        .collect();
    Ok(BinnedColumn {
        bins,
        n_bins: cuts.len() + 1,
        cuts,
    })
}

/// Shannon entropy of a count vector, in bits. Zero counts contribute zero.
pub fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn check_pair(x: &[u32], y: &[usize]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Invalid("empty column".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Invalid(format!(
            "column has {} rows, labels {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// Joint counts of (bin, class), sized by the maxima present.
pub fn contingency(x: &[u32], y: &[usize]) -> Result<Vec<Vec<usize>>> {
    check_pair(x, y)?;
    let n_x = *x.iter().max().unwrap() as usize + 1;
    let n_y = *y.iter().max().unwrap() + 1;
    let mut table = vec![vec![0usize; n_y]; n_x];
    for (&b, &c) in x.iter().zip(y) {
        table[b as usize][c] += 1;
    }
    Ok(table)
}

/// Information gain H(Y) - H(Y|X), in bits. Non-negative up to rounding.
pub fn info_gain(x: &[u32], y: &[usize]) -> Result<f64> {
    let table = contingency(x, y)?;
    let n = x.len() as f64;
    let class_counts = column_sums(&table);
    let h_y = entropy(&class_counts);
    let h_y_given_x: f64 = table
        .iter()
        .map(|row| {
            let total: usize = row.iter().sum();
            (total as f64 / n) * entropy(row)
        })
        .sum();
    Ok(h_y - h_y_given_x)
}

/// Information gain normalized by the attribute's own entropy. Zero when the
/// attribute takes a single value (its intrinsic information is zero).
pub fn gain_ratio(x: &[u32], y: &[usize]) -> Result<f64> {
    let ig = info_gain(x, y)?;
    let mut bin_counts = vec![0usize; *x.iter().max().unwrap() as usize + 1];
    for &b in x {
        bin_counts[b as usize] += 1;
    }
    let h_x = entropy(&bin_counts);
    if h_x == 0.0 {
        return Ok(0.0);
    }
    Ok(ig / h_x)
}

/// Pearson chi-square statistic of a contingency table. Cells in rows or
/// columns with zero marginal totals contribute nothing.
pub fn chi_square(table: &[Vec<usize>]) -> Result<f64> {
    if table.is_empty() || table[0].is_empty() {
        return Err(Error::Invalid("empty contingency table".into()));
    }
    let n_cols = table[0].len();
    if table.iter().any(|r| r.len() != n_cols) {
        return Err(Error::Invalid("ragged contingency table".into()));
    }
    let row_totals: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let col_totals = column_sums(table);
    let n: usize = row_totals.iter().sum();
    if n == 0 {
        return Err(Error::Invalid("contingency table has no observations".into()));
    }
    let nf = n as f64;
    let mut stat = 0.0;
    for (i, row) in table.iter().enumerate() {
        if row_totals[i] == 0 {
            continue;
        }
        for (j, &obs) in row.iter().enumerate() {
            if col_totals[j] == 0 {
                continue;
            }
            let expected = row_totals[i] as f64 * col_totals[j] as f64 / nf;
            let d = obs as f64 - expected;
            stat += d * d / expected;
        }
    }
    Ok(stat)
}

/// Chi-square of one attribute against the labels.
pub fn chi_square_score(x: &[u32], y: &[usize]) -> Result<f64> {
    chi_square(&contingency(x, y)?)
}

/// Training accuracy of the one-rule classifier on this attribute alone:
/// each bin predicts its majority class (ties to the lower class id).
pub fn oner_merit(x: &[u32], y: &[usize]) -> Result<f64> {
    let table = contingency(x, y)?;
    let correct: usize = table
        .iter()
        .map(|row| row.iter().max().copied().unwrap_or(0))
        .sum();
    Ok(correct as f64 / x.len() as f64)
}

fn column_sums(table: &[Vec<usize>]) -> Vec<usize> {
    let n_cols = table.first().map(|r| r.len()).unwrap_or(0);
    let mut sums = vec![0usize; n_cols];
    for row in table {
        for (j, &v) in row.iter().enumerate() {
            sums[j] += v;
        }
    }
    sums
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub attr: usize,
    pub merit: f64,
    /// 1-based position, descending merit, ties to the lower attribute id.
    pub rank: usize,
}

/// A full ranking of every attribute present in a dataset under one method.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub method: FilterMethod,
    pub entries: Vec<RankEntry>,
}

impl RankedList {
    /// Attribute ids of the top `k` entries (fewer when the list is short).
    pub fn top_k(&self, k: usize) -> std::collections::BTreeSet<usize> {
        self.entries.iter().take(k).map(|e| e.attr).collect()
    }

    /// Rank of an attribute, if it appears in the list.
    pub fn rank_of(&self, attr: usize) -> Option<usize> {
        self.entries.iter().find(|e| e.attr == attr).map(|e| e.rank)
    }
}

/// Score every attribute of `d` under `method` and return the ranking.
///
/// Attribute merit is the maximum over the attribute's columns. A numeric
/// column that is constant cannot be binned and scores 0 for the discrete
/// methods instead of failing the whole ranking. ReliefF scores all columns
/// in one pass over the data.
pub fn rank_attributes(
    d: &Dataset,
    method: FilterMethod,
    binning: &BinningSpec,
) -> Result<RankedList> {
    if d.n_rows() == 0 || d.n_cols() == 0 {
        return Err(Error::Invalid("cannot rank an empty dataset".into()));
    }
    let labels = d.label_ids();

    let col_scores: Vec<f64> = match method {
        FilterMethod::ReliefF => relief_weights(d)?,
        _ => {
            let mut scores = Vec::with_capacity(d.n_cols());
            for c in d.columns() {
                let bins: Vec<u32> = match &c.data {
                    ColumnData::Nominal { codes, .. } => codes.clone(),
                    ColumnData::Numeric(v) => {
                        match bin_numeric(v, binning) {
                            Ok(b) => b.bins,
                            // Constant column: no information, lowest merit.
                            Err(Error::Data(_)) => {
                                scores.push(0.0);
                                continue;
                            }
                            Err(e) => return Err(e),
                        }
                    }
                };
                let s = match method {
                    FilterMethod::OneR => oner_merit(&bins, &labels)?,
                    FilterMethod::ChiSquare => chi_square_score(&bins, &labels)?,
                    FilterMethod::GainRatio => gain_ratio(&bins, &labels)?,
                    FilterMethod::InfoGain => info_gain(&bins, &labels)?,
                    FilterMethod::ReliefF => unreachable!(),
                };
                scores.push(s);
            }
            scores
        }
    };

    let mut entries: Vec<RankEntry> = d
        .present_attributes()
        .into_iter()
        .map(|attr| {
            let merit = d
                .attr_columns(attr)
                .into_iter()
                .map(|j| col_scores[j])
                .fold(f64::NEG_INFINITY, f64::max);
            RankEntry {
                attr,
                merit,
                rank: 0,
            }
        })
        .collect();
    entries.sort_by(|a, b| b.merit.total_cmp(&a.merit).then(a.attr.cmp(&b.attr)));
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    Ok(RankedList { method, entries })
}
