use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error classes, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Precondition,
    Numeric,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("operator is not positive on the region (smallest Rayleigh quotient estimate {0:e})")]
    NotPositive(f64),

    #[error("iteration did not converge after {iterations} steps (last estimates: {log:?})")]
    NoConvergence { iterations: usize, log: Vec<f64> },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) | Error::Input(_) | Error::InvalidGraph(_) => ErrorClass::Parse,
            Error::UnknownVertex(_)
            | Error::EmptyGraph
            | Error::Precondition(_)
            | Error::TruncationTooSmall(_)
            | Error::NotPositive(_) => ErrorClass::Precondition,
            Error::NoConvergence { .. } | Error::Numerical(_) => ErrorClass::Numeric,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
