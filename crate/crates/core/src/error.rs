use thiserror::Error;

use crate::field::{FieldError, PrecisionFailure};
use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("vertex {vertex} lies on the materialized horizon and the graph has no generator to extend it")]
    HorizonExhausted { vertex: Vertex },
    #[error("vertex set is not connected: vertex {vertex} is unreachable from the root inside it")]
    Disconnected { vertex: Vertex },
    #[error("vertex {vertex} is not in the domain")]
    NotInDomain { vertex: Vertex },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid graph spec: {0}")]
    Spec(String),
}

/// Coarse failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Spec,
    PrecisionExhausted,
    Precondition,
}

impl CoreError {
    pub fn precondition(msg: impl Into<String>) -> Self {
        CoreError::Precondition(msg.into())
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            CoreError::Spec(_)
            | CoreError::Field(FieldError::Syntax { .. })
            | CoreError::Field(FieldError::DuplicateExponent { .. }) => ErrorClass::Spec,
            CoreError::Field(e) if e.is_precision_exhausted() => ErrorClass::PrecisionExhausted,
            _ => ErrorClass::Precondition,
        }
    }
}

impl PrecisionFailure for CoreError {
    fn precision_exhausted(&self) -> bool {
        self.class() == ErrorClass::PrecisionExhausted
    }
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
