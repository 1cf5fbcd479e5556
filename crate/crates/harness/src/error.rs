use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fragile_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) fn config(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}
