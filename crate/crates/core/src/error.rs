//! Error types shared across the crate.

use thiserror::Error;

/// Syntax error with a byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

/// Errors raised by engines and base operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("logic mismatch: expected {expected}, got {got}")]
    LogicMismatch { expected: &'static str, got: &'static str },
    #[error("malformed query: {0}")]
    Shape(String),
    #[error("enumeration would produce about {estimate} candidates, over the cap of {cap}")]
    EnumerationCap { estimate: u128, cap: u128 },
}

/// Model-file errors carry a line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ModelError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ModelError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ModelError { line, col, msg: msg.into() }
    }
}
