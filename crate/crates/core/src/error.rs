use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("non-finite coordinate at point {point}, axis {axis}")]
    NonFinite { point: usize, axis: usize },

    #[error("{path}: row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: row {row}, column {column}: cannot parse {field:?} as a real number")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: usize,
        field: String,
    },

    #[error("{0}: file contains no points")]
    EmptyFile(PathBuf),

    #[error("filtration would hold {requested} simplices, above the cap of {cap}")]
    SimplexBudget { requested: u128, cap: usize },

    #[error("filtration holds simplices up to dimension {available}, degree {degree} needs dimension {needed}")]
    InsufficientDepth {
        degree: usize,
        needed: usize,
        available: usize,
    },

    #[error("kernel system solve failed (|I| = {size}, condition estimate {condition:.3e}); raise the jitter")]
    KernelSolve { size: usize, condition: f64 },

    #[error("operation requires {expected}-dimensional points, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("run aborted at epoch {epoch}: {source}")]
    RunAborted {
        epoch: usize,
        #[source]
        source: Box<Error>,
        /// Records of the epochs completed before the failure.
        partial: Box<crate::optimizer::RunTrajectory>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
