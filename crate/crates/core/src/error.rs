use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed topology document: {0}")]
    Malformed(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("operation requires a {expected} network, got {found}")]
    WrongModel { expected: &'static str, found: &'static str },

    #[error("{what} exceeds the exhaustive cap ({size} > {cap})")]
    CapExceeded { what: &'static str, size: usize, cap: usize },

    #[error("receiver D{receiver} cannot decode its codewords under this schedule")]
    Infeasible { receiver: usize },

    #[error("no case matches gains {0}")]
    NoCase(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
