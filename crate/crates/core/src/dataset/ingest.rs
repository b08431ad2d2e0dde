//! CSV ingestion with listwise deletion of incomplete rows.

use std::collections::HashMap;
use std::path::Path;

use crate::dataset::schema::{AttributeSchema, ColumnRole};
use crate::dataset::{
    discretize_income, AttributeInfo, Column, ColumnData, Dataset, IncomeClass,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestStats {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_dropped: usize,
}

/// Load an extract per `schema`. See [`load_csv_with_stats`].
pub fn load_csv(path: &Path, schema: &AttributeSchema) -> Result<Dataset> {
    load_csv_with_stats(path, schema).map(|(d, _)| d)
}

/// Load an extract, also reporting how many rows listwise deletion removed.
///
/// Columns are matched to the schema by header name; file columns the schema
/// does not mention are ignored. A row is dropped when any schema column
/// (other than ignored ones) holds a missing token. Numeric cells must parse
/// to finite floats and the target must be a valid income.
pub fn load_csv_with_stats(
    path: &Path,
    schema: &AttributeSchema,
) -> Result<(Dataset, IngestStats)> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Data(format!("{}: cannot open", path.display())),
            _ => Error::Csv(e),
        })?;

    let headers = reader.headers()?.clone();
    let mut header_pos: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        header_pos.entry(h).or_default().push(i);
    }

    // Schema columns that take part in ingestion, with their file positions.
    struct Bound {
        schema_idx: usize,
        file_idx: usize,
    }
    let mut bound = Vec::new();
    for (si, sc) in schema.columns.iter().enumerate() {
        if sc.role == ColumnRole::Ignored {
            continue;
        }
        match header_pos.get(sc.name.as_str()).map(Vec::as_slice) {
            Some([one]) => bound.push(Bound {
                schema_idx: si,
                file_idx: *one,
            }),
            Some(many) => {
                return Err(Error::Data(format!(
                    "{}: column {} appears {} times in the header",
                    path.display(),
                    sc.name,
                    many.len()
                )))
            }
            None => {
                return Err(Error::Data(format!(
                    "{}: column {} not found in header",
                    path.display(),
                    sc.name
                )))
            }
        }
    }

    // Accumulators per bound column.
    enum Acc {
        Numeric(Vec<f64>),
        Nominal {
            codes: Vec<u32>,
            categories: Vec<String>,
            index: HashMap<String, u32>,
        },
        Target(Vec<IncomeClass>),
    }
    let mut accs: Vec<Acc> = bound
        .iter()
        .map(|b| match schema.columns[b.schema_idx].role {
            ColumnRole::Numeric => Acc::Numeric(Vec::new()),
            ColumnRole::Nominal => Acc::Nominal {
                codes: Vec::new(),
                categories: Vec::new(),
                index: HashMap::new(),
            },
            ColumnRole::Target => Acc::Target(Vec::new()),
            ColumnRole::Ignored => unreachable!("ignored columns are not bound"),
        })
        .collect();

    let mut rows_read = 0usize;
    let mut rows_dropped = 0usize;
    for (rec_no, rec) in reader.records().enumerate() {
        let rec = rec?;
        rows_read += 1;
        let line = rec_no + 2; // header is line 1

        let missing = bound.iter().any(|b| {
            let cell = rec.get(b.file_idx).unwrap_or("");
            schema.missing_tokens.contains(cell)
        });
        if missing {
            rows_dropped += 1;
            continue;
        }

        for (b, acc) in bound.iter().zip(accs.iter_mut()) {
            let name = &schema.columns[b.schema_idx].name;
            let cell = rec.get(b.file_idx).unwrap_or("");
            match acc {
                Acc::Numeric(v) => {
                    let x: f64 = cell.trim().parse().map_err(|_| {
                        Error::Data(format!(
                            "{}: line {line}, column {name}: not a number: {cell:?}",
                            path.display()
                        ))
                    })?;
                    if !x.is_finite() {
                        return Err(Error::Data(format!(
                            "{}: line {line}, column {name}: non-finite value",
                            path.display()
                        )));
                    }
                    v.push(x);
                }
                Acc::Nominal {
                    codes,
                    categories,
                    index,
                } => {
                    let code = match index.get(cell) {
                        Some(&c) => c,
                        None => {
                            let c = categories.len() as u32;
                            categories.push(cell.to_string());
                            index.insert(cell.to_string(), c);
                            c
                        }
                    };
                    codes.push(code);
                }
                Acc::Target(v) => {
                    let income: f64 = cell.trim().parse().map_err(|_| {
                        Error::Data(format!(
                            "{}: line {line}, column {name}: not a number: {cell:?}",
                            path.display()
                        ))
                    })?;
                    let band = discretize_income(income).map_err(|e| {
                        Error::Data(format!(
                            "{}: line {line}, column {name}: {e}",
                            path.display()
                        ))
                    })?;
                    v.push(band);
                }
            }
        }
    }

    let rows_kept = rows_read - rows_dropped;
    if rows_kept == 0 {
        return Err(Error::Data(format!(
            "{}: no usable rows ({rows_read} read, all dropped)",
            path.display()
        )));
    }

    let mut attributes = Vec::new();
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for (b, acc) in bound.iter().zip(accs.into_iter()) {
        let sc = &schema.columns[b.schema_idx];
        match acc {
            Acc::Numeric(v) => {
                let attr = attributes.len();
                attributes.push(AttributeInfo {
                    name: sc.name.clone(),
                    group: sc.group,
                });
                columns.push(Column {
                    name: sc.name.clone(),
                    attr,
                    data: ColumnData::Numeric(v),
                });
            }
            Acc::Nominal {
                codes, categories, ..
            } => {
                let attr = attributes.len();
                attributes.push(AttributeInfo {
                    name: sc.name.clone(),
                    group: sc.group,
                });
                columns.push(Column {
                    name: sc.name.clone(),
                    attr,
                    data: ColumnData::Nominal { codes, categories },
                });
            }
            Acc::Target(v) => labels = v,
        }
    }

    let target_name = schema.target().map(|c| c.name.clone()).unwrap_or_default();
    let dataset = Dataset::new(attributes, columns, labels, 4, target_name)?;
    Ok((
        dataset,
        IngestStats {
            rows_read,
            rows_kept,
            rows_dropped,
        },
    ))
}

impl Dataset {
    /// Serialize rows back to CSV: feature columns in order, target last as a
    /// representative income inside each band. Nominal columns write their
    /// category strings. Numeric values use the shortest exact decimal form,
    /// so a write/load cycle reproduces the data bit for bit.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = self.columns().iter().map(|c| c.name.clone()).collect();
        header.push(self.target_name().to_string());
        out.push_str(&crate::table::csv_record(&header));
        out.push('\n');
        for row in 0..self.n_rows() {
            let mut fields: Vec<String> = Vec::with_capacity(self.n_cols() + 1);
            for c in self.columns() {
                match &c.data {
                    ColumnData::Numeric(v) => fields.push(format!("{}", v[row])),
                    ColumnData::Nominal { codes, categories } => {
                        fields.push(categories[codes[row] as usize].clone())
                    }
                }
            }
            fields.push(format!("{}", self.labels()[row].representative_income()));
            out.push_str(&crate::table::csv_record(&fields));
            out.push('\n');
        }
        out
    }
}
