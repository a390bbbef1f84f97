use thiserror::Error;

/// Errors produced by the distribution, optimization and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
