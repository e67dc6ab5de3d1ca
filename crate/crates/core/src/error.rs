use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coordinate {0}")]
    InvalidCoordinate(String),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("{symbol} expects {expected} argument(s), got {got}")]
    ArityMismatch {
        symbol: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("variable index {index} is out of range for a dataset with {width} columns")]
    UnknownVariable { index: usize, width: usize },

    #[error("length mismatch: {0} predictions vs {1} targets")]
    LengthMismatch(usize, usize),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid primitive set: {0}")]
    InvalidPrimitiveSet(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("population must hold at least {needed} member(s), has {got}")]
    PopulationTooSmall { needed: usize, got: usize },

    #[error("series of length {len} is too short for {rows} rows with maximum lag {max_lag}")]
    SeriesTooShort {
        len: usize,
        rows: usize,
        max_lag: usize,
    },

    #[error("missing target column `{0}`")]
    MissingTargetColumn(String),

    #[error("requested {requested} rows but only {available} usable rows are available")]
    TooFewRows { requested: usize, available: usize },

    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
