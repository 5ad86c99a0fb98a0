use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("invalid quantum object: {0}")]
    InvalidQuantum(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("enumeration cap exceeded: {0}")]
    EnumerationCap(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
