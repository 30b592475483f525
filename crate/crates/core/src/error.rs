use thiserror::Error;

use crate::model::MetricViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric: {0}")]
    Metric(#[from] MetricViolation),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("enumeration of {count} center sets exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
