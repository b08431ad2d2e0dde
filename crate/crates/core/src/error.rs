use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Schema problems: duplicate columns, missing target, unknown roles.
    #[error("schema: {0}")]
    Schema(String),

    /// Malformed or unusable input data (bad values, empty tables, header
    /// mismatches). Carries enough context to locate the offending cell.
    #[error("data: {0}")]
    Data(String),

    /// A configuration value is out of range or inconsistent.
    #[error("config: {0}")]
    Config(String),

    /// An operation was called with arguments that violate its contract
    /// (mismatched lengths, out-of-range indices, degenerate inputs).
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
