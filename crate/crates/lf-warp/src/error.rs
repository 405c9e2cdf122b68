use thiserror::Error;

#[derive(Debug, Error)]
pub enum WarpError {
    #[error("shape mismatch on {what}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        what: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("disparity value {value} exceeds the allowed magnitude {max}")]
    DisparityOutOfRange { value: f64, max: f64 },

    #[error("disparity values must be finite")]
    NonFinite,

    #[error("center image values must be finite and in [0, 1], found {0}")]
    InvalidCenter(f64),

    #[error(transparent)]
    Core(#[from] lf_core::CoreError),
}

pub type Result<T> = std::result::Result<T, WarpError>;
