use thiserror::Error;

/// Errors raised by light-field containers and slicing operations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("{axis} index out of range: got {got}, valid range is {min}..={max}")]
    OutOfRange {
        axis: &'static str,
        got: i64,
        min: i64,
        max: i64,
    },

    #[error("extent mismatch on {what}: expected {expected:?}, got {got:?}")]
    ExtentMismatch {
        what: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("invalid light field: {0}")]
    InvalidField(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
