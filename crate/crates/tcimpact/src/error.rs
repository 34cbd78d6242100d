//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by any stage of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on caller-supplied data was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A structured file failed to load; carries the 1-based row number
    /// where the problem was detected when one is known.
    #[error("load error in {path}{}: {msg}", row.map(|r| format!(" (row {r})")).unwrap_or_default())]
    Load {
        path: String,
        row: Option<usize>,
        msg: String,
    },

    /// An estimator could not produce a result (singular design, boundary
    /// solution, invalid sample).
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// An iterative optimizer exhausted its iteration budget. The trailing
    /// objective values are carried for diagnosis.
    #[error("did not converge: {context} (last objective values: {trace:?})")]
    NonConvergence { context: String, trace: Vec<f64> },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn estimation(msg: impl Into<String>) -> Self {
        Error::Estimation(msg.into())
    }

    pub(crate) fn load(path: &str, row: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Load {
            path: path.to_string(),
            row,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
