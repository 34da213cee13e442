//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of parsing, validation, coding and solving.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Text input does not follow the expected grammar.
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// A variable, vector or box does not match the declared dimension.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Two pieces of a piecewise polynomial claim a common point.
    #[error("overlapping piece regions: {0}")]
    OverlappingPieces(String),

    /// A point lies outside every declared piece region.
    #[error("point lies outside every piece region")]
    UndefinedRegion,

    /// An index or coordinate is outside its valid range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A bit stream cannot be decoded.
    #[error("malformed codeword at bit {pos}: {msg}")]
    Malformed { pos: usize, msg: String },

    /// A decoded or supplied structure breaks one of its invariants.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// The exact solver refused an instance larger than its budget.
    #[error("budget exceeded: {size} voxels > budget {budget}")]
    BudgetExceeded { size: usize, budget: usize },

    /// The representative search of the decoder gave up.
    #[error("solver failure on box {index}: {msg}")]
    SolverFailure { index: usize, msg: String },

    /// File system failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
