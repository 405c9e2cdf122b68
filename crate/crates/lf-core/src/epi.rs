//! Epipolar-plane image extraction.
//!
//! An EPI fixes one spatial coordinate and one angular coordinate and slices
//! the remaining spatial/angular pair into a 2D image. Scene points at
//! constant disparity trace lines through it whose slope is the disparity.

use ndarray::Array3;

use crate::error::{CoreError, Result};
use crate::light_field::LightField;

/// Which spatial axis the EPI spans. `X` pairs spatial `x` with angular `v`
/// (a horizontal EPI at a fixed row); `Y` pairs spatial `y` with angular `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpiAxis {
    X,
    Y,
}

/// A 2D `(angular, spatial, c)` slice plus the coordinates it was cut at.
/// All indices are 0-based storage indices.
#[derive(Debug, Clone)]
pub struct Epi {
    pub data: Array3<f64>,
    pub axis: EpiAxis,
    /// The fixed spatial index (the row for `EpiAxis::X`, the column for
    /// `EpiAxis::Y`).
    pub fixed_spatial: usize,
    /// The fixed angular storage index on the non-varying angular axis.
    pub fixed_angular: usize,
}

/// Slice an EPI out of a light field at fixed storage indices.
pub fn extract_epi(
    lf: &LightField,
    axis: EpiAxis,
    fixed_spatial: usize,
    fixed_angular: usize,
) -> Result<Epi> {
    let (a_u, a_v) = lf.angular_extents();
    let (h, w) = lf.spatial_extents();
    let c = lf.channels();
    let (spatial_n, spatial_max, angular_n, angular_max) = match axis {
        EpiAxis::X => (w, h, a_v, a_u),
        EpiAxis::Y => (h, w, a_u, a_v),
    };
    if fixed_spatial >= spatial_max {
        return Err(CoreError::OutOfRange {
            axis: match axis {
                EpiAxis::X => "spatial y",
                EpiAxis::Y => "spatial x",
            },
            got: fixed_spatial as i64,
            min: 0,
            max: spatial_max as i64 - 1,
        });
    }
    if fixed_angular >= angular_max {
        return Err(CoreError::OutOfRange {
            axis: match axis {
                EpiAxis::X => "angular u",
                EpiAxis::Y => "angular v",
            },
            got: fixed_angular as i64,
            min: 0,
            max: angular_max as i64 - 1,
        });
    }

    let data = Array3::from_shape_fn((angular_n, spatial_n, c), |(ia, is, ch)| match axis {
        EpiAxis::X => lf.data()[[fixed_angular, ia, fixed_spatial, is, ch]],
        EpiAxis::Y => lf.data()[[ia, fixed_angular, is, fixed_spatial, ch]],
    });
    Ok(Epi {
        data,
        axis,
        fixed_spatial,
        fixed_angular,
    })
}
