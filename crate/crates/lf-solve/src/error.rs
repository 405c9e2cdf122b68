use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("extent mismatch on {what}: expected {expected:?}, got {got:?}")]
    ExtentMismatch {
        what: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("configured mode is {config} but the provided references are for {given}")]
    ModeMismatch {
        config: &'static str,
        given: &'static str,
    },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("at least one measurement is required")]
    NoMeasurements,

    #[error("the neighbour offset set must be non-empty")]
    EmptyOffsetSet,

    #[error("loss became non-finite at level {level}, iteration {iteration}")]
    Diverged { level: usize, iteration: usize },

    #[error("failed to parse solver configuration: {0}")]
    ConfigParse(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] lf_core::CoreError),

    #[error(transparent)]
    Warp(#[from] lf_warp::WarpError),

    #[error(transparent)]
    Sensing(#[from] lf_sensing::SensingError),
}

pub type Result<T> = std::result::Result<T, SolveError>;
