// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} at index {index} is not binary (expected 0 or 1)")]
    NonBinary { index: usize, value: u8 },

    #[error(
        "intervals are not sorted by start: {what} interval {index} starts before its predecessor"
    )]
    Unsorted { what: &'static str, index: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("onset-maxima merging requires pointwise scores covering every interval")]
    MissingScores,

    #[error("constructed target intervals overlap for event pairs {pairs:?}")]
    OverlappingTargets { pairs: Vec<(usize, usize)> },

    #[error(
        "infeasible onset packing: {count} events with {gap_s} s spacing do not fit in {night_s} s"
    )]
    InfeasiblePacking {
        count: usize,
        gap_s: f64,
        night_s: f64,
    },

    #[error("{0} fold is empty")]
    EmptyFold(&'static str),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Validation { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed report: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Self::InvalidInput(message.into())
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
