//! Crate-wide error type.

use alloc::string::String;

/// Errors surfaced by the numeric core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Dimension or layout mismatch between operands.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Invalid parameter value (rates, epochs, split specs, ...).
    #[error("invalid parameter: {0}")]
    Param(String),
    /// Index outside the valid range.
    #[error("index {index} out of bounds for length {len}")]
    Bounds { index: usize, len: usize },
    /// Value outside its domain (negative flow, GTI outside [0, 100], ...).
    #[error("data error: {0}")]
    Data(String),
    /// Unknown country code or missing registry entry.
    #[error("registry error: {0}")]
    Registry(String),
    /// Non-finite value where a finite one is required.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Degenerate input (constant truth, underdetermined system, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = core::result::Result<T, Error>;
