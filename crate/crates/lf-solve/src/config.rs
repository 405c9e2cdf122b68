//! Solver configuration, loadable from JSON with strict field checking.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolveError};

/// Which residual the objective minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Residual against a given ground-truth light field (validation).
    Supervised,
    /// Residual against observed coded images through the forward model
    /// (reconstruction).
    Measurement,
}

impl SolveMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMode::Supervised => "supervised",
            SolveMode::Measurement => "measurement",
        }
    }
}

fn default_lambda_dc() -> f64 {
    0.008
}
fn default_lambda_tv() -> f64 {
    0.01
}
fn default_d_max() -> f64 {
    10.0
}
fn default_pyramid_levels() -> usize {
    4
}
fn default_iters_per_level() -> usize {
    300
}
fn default_step_size() -> f64 {
    0.05
}
fn default_robust_eps() -> f64 {
    1e-3
}
fn default_multi_start_signs() -> bool {
    true
}
fn default_seed() -> u64 {
    0
}
fn default_mode() -> SolveMode {
    SolveMode::Measurement
}

/// All optimizer hyperparameters and regularizer weights.
///
/// Missing JSON fields take their defaults; unknown fields are rejected so
/// typos cannot silently disable a regularizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_lambda_dc")]
    pub lambda_dc: f64,
    #[serde(default = "default_lambda_tv")]
    pub lambda_tv: f64,
    #[serde(default = "default_d_max")]
    pub d_max: f64,
    #[serde(default = "default_pyramid_levels")]
    pub pyramid_levels: usize,
    #[serde(default = "default_iters_per_level")]
    pub iters_per_level: usize,
    #[serde(default = "default_step_size")]
    pub step_size: f64,
    #[serde(default = "default_robust_eps")]
    pub robust_eps: f64,
    #[serde(default = "default_multi_start_signs")]
    pub multi_start_signs: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: SolveMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda_dc: default_lambda_dc(),
            lambda_tv: default_lambda_tv(),
            d_max: default_d_max(),
            pyramid_levels: default_pyramid_levels(),
            iters_per_level: default_iters_per_level(),
            step_size: default_step_size(),
            robust_eps: default_robust_eps(),
            multi_start_signs: default_multi_start_signs(),
            seed: default_seed(),
            mode: default_mode(),
        }
    }
}

impl SolverConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SolverConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_dc < 0.0 || self.lambda_tv < 0.0 {
            return Err(SolveError::Config(
                "regularizer weights must be non-negative".into(),
            ));
        }
        if self.d_max <= 0.0 || !self.d_max.is_finite() {
            return Err(SolveError::Config("d_max must be positive".into()));
        }
        if self.pyramid_levels == 0 {
            return Err(SolveError::Config(
                "pyramid_levels must be at least 1".into(),
            ));
        }
        if self.step_size <= 0.0 || !self.step_size.is_finite() {
            return Err(SolveError::Config("step_size must be positive".into()));
        }
        if self.robust_eps <= 0.0 || !self.robust_eps.is_finite() {
            return Err(SolveError::Config("robust_eps must be positive".into()));
        }
        Ok(())
    }
}
