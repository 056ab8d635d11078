//! Error type shared by every stage of the pipeline.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front-ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or inconsistent input data.
    Data,
    /// Invalid arguments or configuration.
    Usage,
    /// A numerical procedure failed (singular system, non-convergence, ...).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("column `{name}` not found; available columns: {}", available.join(", "))]
    MissingColumn { name: String, available: Vec<String> },

    #[error("row {row}: duplicate date {date}")]
    DuplicateDate { row: usize, date: String },

    #[error("row {row}: cannot parse date `{value}` (expected YYYY-MM-DD)")]
    BadDate { row: usize, value: String },

    #[error("row {row}: non-numeric value `{value}` in column `{column}`")]
    NonNumeric { row: usize, column: String, value: String },

    #[error("series is empty")]
    EmptySeries,

    #[error("series too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("series contains missing values")]
    MissingValues,

    #[error("series has zero variance")]
    ConstantSeries,

    #[error("differencing origin has length {got}, expected {expected}")]
    OriginMismatch { expected: usize, got: usize },

    #[error("abscissae must be strictly increasing (violation at index {index})")]
    NotIncreasing { index: usize },

    #[error("periodic boundary requires equal endpoint ordinates ({first} vs {last})")]
    PeriodicMismatch { first: f64, last: f64 },

    #[error("x = {x} lies outside the knot range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },

    #[error("matrix is rank deficient (column {column})")]
    RankDeficient { column: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("optimizer failed to produce an admissible estimate: {0}")]
    Inadmissible(String),

    #[error("Hessian is not positive definite")]
    NotPositiveDefinite,

    #[error("no candidate order could be fitted")]
    AllCandidatesFailed,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::DuplicateDate { .. }
            | Error::BadDate { .. }
            | Error::NonNumeric { .. }
            | Error::EmptySeries
            | Error::TooShort { .. }
            | Error::MissingValues
            | Error::ConstantSeries
            | Error::NotIncreasing { .. }
            | Error::PeriodicMismatch { .. } => ErrorKind::Data,
            Error::MissingColumn { .. }
            | Error::OriginMismatch { .. }
            | Error::OutOfRange { .. }
            | Error::Dimension(_)
            | Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::ZeroPivot { .. }
            | Error::RankDeficient { .. }
            | Error::Inadmissible(_)
            | Error::NotPositiveDefinite
            | Error::AllCandidatesFailed => ErrorKind::Numerical,
        }
    }
}
