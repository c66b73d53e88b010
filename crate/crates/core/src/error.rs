use thiserror::Error;

/// Errors raised by the library. `is_input_error` separates malformed input
/// from genuine mathematical failures.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("vector {0} is not in the positive cone")]
    NotInCone(String),
    #[error("backend or truncation mismatch: {0}")]
    Mismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("path meets a joint at {0}")]
    HitsJoint(String),
    #[error("path is tangent to a wall at {0}")]
    Tangent(String),
    #[error("path vertex lies on a wall at {0}")]
    VertexOnWall(String),
    #[error("non-central discrepancy at degree {degree}: {detail}")]
    NonCentral { degree: u32, detail: String },
    #[error("genericity failure: {0}")]
    NonGeneric(String),
    #[error("evaluations disagree: {0}")]
    Disagreement(String),
    #[error("arithmetic overflow in lattice coordinates")]
    Overflow,
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), msg: msg.into() }
    }

    /// True for errors caused by malformed or out-of-contract input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::RankMismatch { .. }
                | Error::NotInCone(_)
                | Error::Mismatch(_)
                | Error::Precondition(_)
                | Error::Parse { .. }
                | Error::Unsupported(_)
                | Error::Overflow
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
