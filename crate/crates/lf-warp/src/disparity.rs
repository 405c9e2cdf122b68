//! Per-view disparity fields.

use ndarray::{Array2, Array4, ArrayView2};

use lf_core::AngularOffset;

use crate::error::{Result, WarpError};

/// The output clamp on per-step disparities, in pixels per unit angular
/// offset.
pub const D_MAX: f64 = 10.0;

/// Scalar disparity `D(x, v)` at every view, in pixels of displacement per
/// unit angular step. Stored `(u, v, y, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityField {
    values: Array4<f64>,
}

impl DisparityField {
    /// Wrap a `(u, v, y, x)` array, validating finiteness and the
    /// `[-D_MAX, D_MAX]` range.
    pub fn new(values: Array4<f64>) -> Result<Self> {
        Self::with_limit(values, D_MAX)
    }

    /// Like [`DisparityField::new`] with a caller-chosen clamp limit.
    pub fn with_limit(values: Array4<f64>, d_max: f64) -> Result<Self> {
        for &v in values.iter() {
            if !v.is_finite() {
                return Err(WarpError::NonFinite);
            }
            if v.abs() > d_max {
                return Err(WarpError::DisparityOutOfRange { value: v, max: d_max });
            }
        }
        Ok(DisparityField { values })
    }

    /// A constant field over the given extents.
    pub fn constant(a_u: usize, a_v: usize, height: usize, width: usize, d: f64) -> Result<Self> {
        Self::new(Array4::from_elem((a_u, a_v, height, width), d))
    }

    pub fn values(&self) -> &Array4<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array4<f64> {
        self.values
    }

    /// `(A_u, A_v)`.
    pub fn angular_extents(&self) -> (usize, usize) {
        let d = self.values.dim();
        (d.0, d.1)
    }

    /// `(H, W)`.
    pub fn spatial_extents(&self) -> (usize, usize) {
        let d = self.values.dim();
        (d.2, d.3)
    }

    pub fn offset_to_index(&self, q: AngularOffset) -> Result<(usize, usize)> {
        let (a_u, a_v) = self.angular_extents();
        let iu = q.u as i64 + (a_u as i64 - 1) / 2;
        let iv = q.v as i64 + (a_v as i64 - 1) / 2;
        if iu < 0 || iu >= a_u as i64 || iv < 0 || iv >= a_v as i64 {
            return Err(WarpError::ShapeMismatch {
                what: "angular offset",
                expected: vec![a_u, a_v],
                got: vec![iu.max(0) as usize, iv.max(0) as usize],
            });
        }
        Ok((iu as usize, iv as usize))
    }

    pub fn index_to_offset(&self, iu: usize, iv: usize) -> AngularOffset {
        let (a_u, a_v) = self.angular_extents();
        AngularOffset::new(
            iu as i32 - (a_u as i32 - 1) / 2,
            iv as i32 - (a_v as i32 - 1) / 2,
        )
    }

    /// Borrow the disparity map of the view at `q`.
    pub fn map_at(&self, q: AngularOffset) -> Result<ArrayView2<'_, f64>> {
        let (iu, iv) = self.offset_to_index(q)?;
        Ok(self
            .values
            .index_axis(ndarray::Axis(0), iu)
            .index_axis_move(ndarray::Axis(0), iv))
    }
}

/// Partial derivatives of a scalar objective with respect to every disparity
/// value; same shape as the [`DisparityField`] it differentiates.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpGradient {
    pub values: Array4<f64>,
}

impl WarpGradient {
    pub fn zeros_like(field: &DisparityField) -> Self {
        WarpGradient {
            values: Array4::zeros(field.values().dim()),
        }
    }

    pub fn view_mut_at(&mut self, iu: usize, iv: usize) -> ndarray::ArrayViewMut2<'_, f64> {
        self.values
            .index_axis_mut(ndarray::Axis(0), iu)
            .index_axis_move(ndarray::Axis(0), iv)
    }
}

/// A single-view disparity map.
pub type DisparityMap = Array2<f64>;
