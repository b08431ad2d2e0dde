//! Column schema used when ingesting CSV extracts.

use std::collections::BTreeSet;

use crate::dataset::AttributeGroup;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Numeric,
    Nominal,
    /// Mean-income column; discretized into the four bands.
    Target,
    /// Present in the file but excluded from analysis (ids, bookkeeping).
    Ignored,
}

impl ColumnRole {
    pub fn parse(s: &str) -> Result<ColumnRole> {
        match s.trim().to_ascii_lowercase().as_str() {
            "numeric" => Ok(ColumnRole::Numeric),
            "nominal" => Ok(ColumnRole::Nominal),
            "target" => Ok(ColumnRole::Target),
            "ignored" => Ok(ColumnRole::Ignored),
            other => Err(Error::Schema(format!("unknown column role: {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ColumnRole::Numeric => "numeric",
            ColumnRole::Nominal => "nominal",
            ColumnRole::Target => "target",
            ColumnRole::Ignored => "ignored",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemaColumn {
    pub name: String,
    pub role: ColumnRole,
    pub group: AttributeGroup,
}

/// Declares how to read an extract: which columns to use, their roles and
/// groups, and which cell values count as missing.
#[derive(Debug, Clone)]
pub struct AttributeSchema {
    pub columns: Vec<SchemaColumn>,
    pub missing_tokens: BTreeSet<String>,
}

impl AttributeSchema {
    /// Standard missing markers in Scorecard extracts.
    pub fn default_missing_tokens() -> BTreeSet<String> {
        ["", "NULL", "PrivacySuppressed"]
            .into_iter()
            .map(str::to_string)
            .collect()
    }

    pub fn new(columns: Vec<SchemaColumn>) -> AttributeSchema {
        AttributeSchema {
            columns,
            missing_tokens: Self::default_missing_tokens(),
        }
    }

    /// Exactly one target, unique names, and at least one feature column.
    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for c in &self.columns {
            if c.name.is_empty() {
                return Err(Error::Schema("empty column name".into()));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate schema column: {}", c.name)));
            }
        }
        let targets = self
            .columns
            .iter()
            .filter(|c| c.role == ColumnRole::Target)
            .count();
        if targets != 1 {
            return Err(Error::Schema(format!(
                "schema must declare exactly one target column, found {targets}"
            )));
        }
        let features = self
            .columns
            .iter()
            .filter(|c| matches!(c.role, ColumnRole::Numeric | ColumnRole::Nominal))
            .count();
        if features == 0 {
            return Err(Error::Schema("schema declares no feature columns".into()));
        }
        Ok(())
    }

    pub fn target(&self) -> Option<&SchemaColumn> {
        self.columns.iter().find(|c| c.role == ColumnRole::Target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(name: &str, role: ColumnRole) -> SchemaColumn {
        SchemaColumn {
            name: name.into(),
            role,
            group: AttributeGroup::School,
        }
    }

    #[test]
    fn validate_wants_one_target() {
        let s = AttributeSchema::new(vec![col("a", ColumnRole::Numeric)]);
        assert!(s.validate().is_err());
        let s = AttributeSchema::new(vec![
            col("a", ColumnRole::Numeric),
            col("t", ColumnRole::Target),
            col("u", ColumnRole::Target),
        ]);
        assert!(s.validate().is_err());
        let s = AttributeSchema::new(vec![
            col("a", ColumnRole::Numeric),
            col("t", ColumnRole::Target),
        ]);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn validate_rejects_duplicates_and_pure_targets() {
        let s = AttributeSchema::new(vec![
            col("a", ColumnRole::Numeric),
            col("a", ColumnRole::Nominal),
            col("t", ColumnRole::Target),
        ]);
        assert!(s.validate().is_err());
        let s = AttributeSchema::new(vec![
            col("x", ColumnRole::Ignored),
            col("t", ColumnRole::Target),
        ]);
        assert!(s.validate().is_err());
    }
}
