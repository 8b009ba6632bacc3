use thiserror::Error;

use crate::plmap::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid map:\n{0}")]
    InvalidMap(ValidationReport),

    /// A precondition of a dynamical operation does not hold.
    #[error("{0}")]
    Domain(String),

    /// A search or enumeration exceeded its configured cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
