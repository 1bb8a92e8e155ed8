//! Shared error type for parsing, validation, and solver size guards.

use thiserror::Error;

/// Everything that can go wrong while building game objects or running the
/// exact solvers. The variants deliberately mirror how callers should react:
/// `Parse`/`Dimension`/`Domain` are bad input, `SizeLimit` means the instance
/// is valid but exceeds a documented exact-solver limit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    /// A rational literal or a matrix file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Inputs have inconsistent or non-square dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An argument is outside the domain a routine is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// The instance exceeds a documented limit of an exact solver.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

pub type Result<T> = std::result::Result<T, GameError>;
