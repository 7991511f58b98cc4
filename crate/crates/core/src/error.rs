//! Error types.
//!
//! `Revert` mirrors transaction reverts: a call that reverts leaves no
//! partial state behind and, inside a search, is data rather than a failure.
//! `SpecError` is for malformed input documents and carries the field path
//! that failed validation.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Revert {
    #[error("arithmetic overflow")]
    Overflow,
    #[error("arithmetic underflow")]
    Underflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient balance")]
    InsufficientBalance,
    #[error("unauthorized")]
    Unauthorized,
    #[error("unknown token {0}")]
    UnknownToken(String),
    #[error("unknown pool {0}")]
    UnknownPool(String),
    #[error("unknown hook {0}")]
    UnknownHook(String),
    #[error("hook guard violated: {0}")]
    GuardViolation(String),
    #[error("zero reserves")]
    ZeroReserves,
    #[error("insufficient output")]
    InsufficientOutput,
    #[error("sync would leave a zero reserve")]
    SyncZeroReserve,
    #[error("argument resolution failed: {0}")]
    ArgResolution(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl SpecError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError {
            path: path.into(),
            message: message.into(),
        }
    }
}
