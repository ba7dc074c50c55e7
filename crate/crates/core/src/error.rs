use thiserror::Error;

use crate::set::ElementId;

#[derive(Debug, Error)]
pub enum OcrsError {
    #[error("element {0} is outside the ground set")]
    ElementOutsideGround(ElementId),

    #[error("set is not a subset of the ground set")]
    NotASubset,

    #[error("{what} requires at most {max} elements, got {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = OcrsError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> OcrsError {
    OcrsError::Domain(msg.into())
}
