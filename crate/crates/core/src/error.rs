use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("insufficient levels: requested {requested}, diagram has {available} and no tail")]
    InsufficientLevels { requested: usize, available: usize },

    #[error("unknown level {0}")]
    UnknownLevel(usize),

    #[error("unknown vertex {label:?} at level {level}")]
    UnknownVertex { level: usize, label: String },

    #[error("unknown vertex {0:?}")]
    UnknownLabel(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(ValidationReport),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("arithmetic overflow")]
    Overflow,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid subsequence: {0}")]
    Subsequence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("graph too large: {vertices} vertices exceeds cap {cap}")]
    GraphTooLarge { vertices: usize, cap: usize },

    #[error("staged graph requires a depth bound")]
    StagedWithoutDepth,

    #[error("A-membership unstable in tail window: {0}")]
    UnstableTail(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
