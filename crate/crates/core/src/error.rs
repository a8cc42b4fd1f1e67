use thiserror::Error;

use crate::dist::ModelId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("row {row}: {message}")]
    InvalidRow { row: usize, message: String },

    #[error("duplicate entry for country `{country}` in year {year} (row {row})")]
    DuplicateEntry {
        country: String,
        year: i32,
        row: usize,
    },

    #[error("year {0} is not present in the panel")]
    UnknownYear(i32),

    #[error("need at least {required} observations, got {available}")]
    InsufficientData { required: usize, available: usize },

    #[error("non-positive or non-finite value {value} at index {index}")]
    NonPositive { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability {0} is outside (0, 1)")]
    InvalidProbability(f64),

    #[error("{model} fit failed to converge after {attempts} attempts")]
    NonConvergence { model: ModelId, attempts: usize },

    #[error("fits were computed on different samples")]
    MismatchedSamples,

    #[error("regressor has zero variance")]
    DegenerateRegressor,

    #[error("no sign change in bracket [{lower}, {upper}]: R - target = {f_lower} and {f_upper}")]
    NoRootInBracket {
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("country count mismatch: expected {expected}, got {actual}")]
    CountMismatch { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
