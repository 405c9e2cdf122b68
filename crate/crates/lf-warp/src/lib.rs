//! Backward warping of the centerview through a disparity field, and the
//! analytic derivatives of the warp with respect to disparity.
//!
//! Everything here is a pure function over immutable inputs; gradient
//! accumulation runs in a fixed view order so results are deterministic.

mod disparity;
mod error;
mod warp;

pub use disparity::{DisparityField, DisparityMap, WarpGradient, D_MAX};
pub use error::{Result, WarpError};
pub use warp::{
    render_lf, render_lf_grad, render_lf_grad_curv, warp_consistency_sample, warp_view,
    warp_view_grad, warp_view_owned,
};
