//! The 4D light-field container and its angular index conventions.
//!
//! A light field is stored as a dense `(u, v, y, x, c)` array: `u` and `v`
//! are the vertical and horizontal angular storage indices, `y`/`x` the
//! spatial pixel coordinates and `c` the color channel. Storage index
//! `(i, j)` corresponds to the angular offset
//! `(i - (A_u - 1) / 2, j - (A_v - 1) / 2)`, so the center view sits at
//! offset `(0, 0)`.

use ndarray::{Array3, Array5, ArrayView3};

use crate::error::{CoreError, Result};
use crate::interp::BilinearTap;

/// A 2D image with channels, indexed `(y, x, c)`.
pub type Image = Array3<f64>;

/// Signed angular offset of a view relative to the center view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngularOffset {
    /// Vertical angular component (pairs with spatial `y`).
    pub u: i32,
    /// Horizontal angular component (pairs with spatial `x`).
    pub v: i32,
}

impl AngularOffset {
    pub const CENTER: AngularOffset = AngularOffset { u: 0, v: 0 };

    pub fn new(u: i32, v: i32) -> Self {
        AngularOffset { u, v }
    }
}

/// 4D spatio-angular radiance array `L(x, v)` with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightField {
    data: Array5<f64>,
}

impl LightField {
    /// Wrap a `(u, v, y, x, c)` array, validating the container invariants:
    /// odd angular extents, spatial extents of at least 2, one or three
    /// channels, and finite values in `[0, 1]`.
    pub fn new(data: Array5<f64>) -> Result<Self> {
        let (a_u, a_v, h, w, c) = data.dim();
        if a_u % 2 == 0 || a_v % 2 == 0 || a_u == 0 || a_v == 0 {
            return Err(CoreError::InvalidField(format!(
                "angular extents must be odd and positive, got {a_u}x{a_v}"
            )));
        }
        if h < 2 || w < 2 {
            return Err(CoreError::InvalidField(format!(
                "spatial extents must be at least 2x2, got {h}x{w}"
            )));
        }
        if c != 1 && c != 3 {
            return Err(CoreError::InvalidField(format!(
                "channel count must be 1 or 3, got {c}"
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0) {
            return Err(CoreError::InvalidField(format!(
                "radiance values must be finite and in [0, 1], found {bad}"
            )));
        }
        Ok(LightField { data })
    }

    /// Like [`LightField::new`] but without the value-range scan, for callers
    /// that construct data already known to be valid (e.g. warps of a valid
    /// field, which cannot leave the input range).
    pub(crate) fn from_parts_unchecked(data: Array5<f64>) -> Self {
        LightField { data }
    }

    pub fn data(&self) -> &Array5<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array5<f64> {
        self.data
    }

    /// `(A_u, A_v)` angular extents.
    pub fn angular_extents(&self) -> (usize, usize) {
        let d = self.data.dim();
        (d.0, d.1)
    }

    /// `(H, W)` spatial extents.
    pub fn spatial_extents(&self) -> (usize, usize) {
        let d = self.data.dim();
        (d.2, d.3)
    }

    pub fn channels(&self) -> usize {
        self.data.dim().4
    }

    /// Map an angular offset to its storage index, erroring with the
    /// offending axis name when out of range.
    pub fn offset_to_index(&self, q: AngularOffset) -> Result<(usize, usize)> {
        let (a_u, a_v) = self.angular_extents();
        let cu = (a_u as i64 - 1) / 2;
        let cv = (a_v as i64 - 1) / 2;
        let iu = q.u as i64 + cu;
        let iv = q.v as i64 + cv;
        if iu < 0 || iu >= a_u as i64 {
            return Err(CoreError::OutOfRange {
                axis: "angular u",
                got: q.u as i64,
                min: -cu,
                max: cu,
            });
        }
        if iv < 0 || iv >= a_v as i64 {
            return Err(CoreError::OutOfRange {
                axis: "angular v",
                got: q.v as i64,
                min: -cv,
                max: cv,
            });
        }
        Ok((iu as usize, iv as usize))
    }

    /// Inverse of [`LightField::offset_to_index`] for valid storage indices.
    pub fn index_to_offset(&self, iu: usize, iv: usize) -> AngularOffset {
        let (a_u, a_v) = self.angular_extents();
        AngularOffset::new(
            iu as i32 - (a_u as i32 - 1) / 2,
            iv as i32 - (a_v as i32 - 1) / 2,
        )
    }

    /// Iterate all angular offsets in storage order (row-major over `(u, v)`).
    pub fn offsets(&self) -> impl Iterator<Item = AngularOffset> + '_ {
        let (a_u, a_v) = self.angular_extents();
        (0..a_u).flat_map(move |iu| (0..a_v).map(move |iv| self.index_to_offset(iu, iv)))
    }

    /// Borrow the sub-aperture view at `q` as a `(y, x, c)` view.
    pub fn view_at(&self, q: AngularOffset) -> Result<ArrayView3<'_, f64>> {
        let (iu, iv) = self.offset_to_index(q)?;
        Ok(self
            .data
            .index_axis(ndarray::Axis(0), iu)
            .index_axis_move(ndarray::Axis(0), iv))
    }

    /// The sub-aperture image at `q`; `get_view(lf, (0,0))` is the centerview.
    pub fn get_view(&self, q: AngularOffset) -> Result<Image> {
        Ok(self.view_at(q)?.to_owned())
    }

    /// Shear (refocus) the light field: the output view at offset `q` samples
    /// the input view at `(y + s*q_u, x + s*q_v)` with bilinear clamp-to-edge
    /// interpolation. `shear(lf, 0)` is bit-identical to `lf`, and for a
    /// field rendered at constant disparity `d`, shearing by `-d` brings all
    /// views onto the centerview.
    pub fn shear(&self, s: f64) -> Result<LightField> {
        if !s.is_finite() {
            return Err(CoreError::InvalidField(format!(
                "shear amount must be finite, got {s}"
            )));
        }
        let (a_u, a_v) = self.angular_extents();
        let (h, w) = self.spatial_extents();
        let c = self.channels();
        let mut out = Array5::zeros((a_u, a_v, h, w, c));
        for iu in 0..a_u {
            for iv in 0..a_v {
                let q = self.index_to_offset(iu, iv);
                let src = self.data.index_axis(ndarray::Axis(0), iu);
                let src = src.index_axis(ndarray::Axis(0), iv);
                let dy = s * q.u as f64;
                let dx = s * q.v as f64;
                for y in 0..h {
                    for x in 0..w {
                        let tap = BilinearTap::at(h, w, y as f64 + dy, x as f64 + dx);
                        for ch in 0..c {
                            let plane = src.index_axis(ndarray::Axis(2), ch);
                            out[[iu, iv, y, x, ch]] = tap.sample(&plane);
                        }
                    }
                }
            }
        }
        Ok(LightField::from_parts_unchecked(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array5;

    fn coded_field(a: usize, h: usize, w: usize) -> LightField {
        // Distinct value per (u, v, y, x) cell, scaled into [0, 1].
        let scale = 1.0 / (a as f64 * 1000.0 + a as f64 * 100.0 + h as f64 * 10.0 + w as f64);
        let data = Array5::from_shape_fn((a, a, h, w, 1), |(u, v, y, x, _)| {
            (u as f64 * 1000.0 + v as f64 * 100.0 + y as f64 * 10.0 + x as f64) * scale
        });
        LightField::new(data).unwrap()
    }

    #[test]
    fn rejects_even_angular_extents() {
        let data = Array5::zeros((2, 3, 4, 4, 1));
        assert!(LightField::new(data).is_err());
    }

    #[test]
    fn rejects_out_of_range_values() {
        let mut data = Array5::zeros((3, 3, 4, 4, 1));
        data[[0, 0, 0, 0, 0]] = 1.5;
        assert!(LightField::new(data).is_err());
    }

    #[test]
    fn get_view_constant_field() {
        let lf = LightField::new(Array5::from_elem((3, 3, 4, 4, 1), 0.5)).unwrap();
        let img = lf.get_view(AngularOffset::new(1, -1)).unwrap();
        assert!(img.iter().all(|&x| x == 0.5));
    }

    #[test]
    fn get_view_center_is_bit_identical() {
        let lf = coded_field(3, 4, 4);
        let img = lf.get_view(AngularOffset::CENTER).unwrap();
        let direct = lf.data().index_axis(ndarray::Axis(0), 1);
        let direct = direct.index_axis(ndarray::Axis(0), 1);
        assert_eq!(img.view(), direct);
    }

    #[test]
    fn get_view_index_arithmetic_brute_force() {
        // Every offset must match a brute-force recomputation of the
        // center-symmetric index mapping.
        let lf = coded_field(3, 4, 4);
        for qu in -1..=1 {
            for qv in -1..=1 {
                let img = lf.get_view(AngularOffset::new(qu, qv)).unwrap();
                let (iu, iv) = ((qu + 1) as usize, (qv + 1) as usize);
                for y in 0..4 {
                    for x in 0..4 {
                        assert_eq!(img[[y, x, 0]], lf.data()[[iu, iv, y, x, 0]]);
                    }
                }
            }
        }
    }

    #[test]
    fn get_view_out_of_range_names_axis() {
        let lf = coded_field(3, 4, 4);
        let err = lf.get_view(AngularOffset::new(2, 0)).unwrap_err();
        assert!(err.to_string().contains("angular u"), "{err}");
        let err = lf.get_view(AngularOffset::new(0, -2)).unwrap_err();
        assert!(err.to_string().contains("angular v"), "{err}");
    }

    #[test]
    fn shear_zero_is_identity() {
        let lf = coded_field(3, 6, 6);
        let sheared = lf.shear(0.0).unwrap();
        assert_eq!(lf.data(), sheared.data());
    }

    #[test]
    fn shear_constant_field_unchanged() {
        let lf = LightField::new(Array5::from_elem((3, 3, 5, 5, 1), 0.25)).unwrap();
        for &s in &[0.5, -1.75, 3.0] {
            let sheared = lf.shear(s).unwrap();
            assert!(sheared.data().iter().all(|&x| (x - 0.25).abs() < 1e-12));
        }
    }

    #[test]
    fn shear_is_linear_in_radiance() {
        let lf1 = coded_field(3, 6, 6);
        let lf2 = {
            let d = lf1.data().mapv(|x| (1.0 - x).clamp(0.0, 1.0));
            LightField::new(d).unwrap()
        };
        let (a, b) = (0.3, 0.7);
        let combo = LightField::new(lf1.data() * a + lf2.data() * b).unwrap();
        let lhs = combo.shear(0.7).unwrap();
        let s1 = lf1.shear(0.7).unwrap();
        let s2 = lf2.shear(0.7).unwrap();
        let rhs = s1.data() * a + s2.data() * b;
        for (l, r) in lhs.data().iter().zip(rhs.iter()) {
            assert!((l - r).abs() < 1e-6);
        }
    }

    #[test]
    fn shear_preserves_value_range() {
        let lf = coded_field(3, 6, 6);
        let (lo, hi) = lf
            .data()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        let sheared = lf.shear(1.3).unwrap();
        for &x in sheared.data() {
            assert!(x >= lo - 1e-6 && x <= hi + 1e-6);
        }
    }
}
