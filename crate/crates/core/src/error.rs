use std::path::PathBuf;

/// Errors raised by dataset construction, partitioning and engine runs.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimensionality mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation needs at least {required} dimensions, dataset has {found}")]
    TooFewDimensions { required: usize, found: usize },

    #[error("point {id}: coordinate {value} must be finite and non-negative")]
    InvalidCoordinate { id: usize, value: f64 },

    #[error("point {id}: coordinate {value} lies outside [0, 1]; the data must be normalized")]
    NotNormalized { id: usize, value: f64 },

    #[error("duplicate point id {0}")]
    DuplicateId(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV in {}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("column `{0}` not found in CSV header")]
    UnknownColumn(String),

    #[error("no row of {} has numeric values in every selected column", path.display())]
    NoRows { path: PathBuf },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
