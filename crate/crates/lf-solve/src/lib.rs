//! Disparity-field estimation by direct numerical minimization of the
//! view-synthesis objective, in either supervised (reference light field)
//! or measurement (coded-image residual) mode.

mod config;
mod error;
mod loss;
mod pyramid;
mod solver;

pub use config::{SolveMode, SolverConfig};
pub use error::{Result, SolveError};
pub use loss::{
    charbonnier, charbonnier_deriv, gradient_magnitude, loss_dc, loss_dc_with_eps,
    loss_measurement, loss_measurement_with_eps, loss_rec, loss_rec_with_eps, loss_tv,
    loss_tv_with_eps, total_loss, total_loss_and_grad, LossBreakdown, SolveTarget,
    DEFAULT_ROBUST_EPS, UNIT_OFFSETS,
};
pub use pyramid::{
    downscale_image, downscale_light_field, effective_levels, upsample_disparity,
    MIN_COARSE_EXTENT,
};
pub use solver::{solve_disparity, SolveReport};
