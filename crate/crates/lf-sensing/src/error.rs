use thiserror::Error;

#[derive(Debug, Error)]
pub enum SensingError {
    #[error("invalid code configuration: {0}")]
    Config(String),

    #[error("extent mismatch between light field {lf:?} and model {model:?}")]
    ExtentMismatch {
        lf: Vec<usize>,
        model: Vec<usize>,
    },

    #[error("weight sum is zero at pixel ({y}, {x}) but normalization was requested")]
    ZeroWeightSum { y: usize, x: usize },

    #[error("unknown capture scheme '{0}'")]
    UnknownScheme(String),

    #[error(transparent)]
    Core(#[from] lf_core::CoreError),
}

pub type Result<T> = std::result::Result<T, SensingError>;
