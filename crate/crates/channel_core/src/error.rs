use thiserror::Error;

/// Errors shared by every crate in the workspace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),

    /// The two inputs have disjoint output supports.
    #[error("input pair ({0}, {1}) has disjoint output supports")]
    InfeasiblePair(usize, usize),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The query lies outside the regime where the quantity is defined.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported size: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
