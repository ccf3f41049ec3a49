use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("containment violated: {0}")]
    Containment(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("instance too large: {0}")]
    Feasibility(String),
    #[error("invalid process: {0}")]
    InvalidProcess(String),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("diagram: {0}")]
    Diagram(String),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant breached: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
