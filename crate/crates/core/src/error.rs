use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("resource cap `{cap}` exceeded: need {needed}, limit {limit}")]
    Resource {
        cap: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_cap(cap: &'static str, needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::Resource { cap, needed, limit })
    } else {
        Ok(())
    }
}
