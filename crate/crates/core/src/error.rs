use thiserror::Error;

/// Errors produced by the estimation and transform routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("tree has no out-of-bag rows")]
    NoOobRows,

    #[error("all trees have empty out-of-bag sets")]
    NoUsableTrees,

    #[error("length must be a power of two, got {0}")]
    NonDyadicLength(usize),

    #[error("signal length {len} shorter than filter length {filter}")]
    SignalTooShort { len: usize, filter: usize },

    #[error("grid index {index} out of range for {len} samples")]
    OffGrid { index: usize, len: usize },

    #[error("coefficient layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("selection requires a partition: {0}")]
    NotAPartition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
