//! Bilinear sampling with clamp-to-edge boundaries.
//!
//! Every resampling operation in the workspace (shearing, view warping,
//! disparity-map sampling and their derivatives) goes through [`BilinearTap`]
//! so the sampling convention is defined exactly once:
//!
//! * sample positions are clamped to `[0, n-1]` per axis (clamp-to-edge);
//! * the interpolation cell is chosen as `i0 = ceil(p) - 1` clamped to
//!   `[0, n-2]`, so at an exact integer coordinate the value is reproduced
//!   bit-identically and the derivative is the one from the lower/left cell;
//! * the derivative with respect to the *unclamped* position is zero once the
//!   position leaves the image, because the clamped sample no longer moves.

use ndarray::ArrayView2;

/// One resolved bilinear sample: cell corners, weights, and the bookkeeping
/// needed to differentiate through the sample.
#[derive(Debug, Clone, Copy)]
pub struct BilinearTap {
    pub y0: usize,
    pub y1: usize,
    pub x0: usize,
    pub x1: usize,
    /// Fractional position inside the cell along y and x, in [0, 1].
    pub fy: f64,
    pub fx: f64,
    /// False when the unclamped position fell outside the image along the
    /// axis; the derivative along that axis is then zero.
    pub y_active: bool,
    pub x_active: bool,
}

impl BilinearTap {
    /// Resolve the tap for position `(py, px)` in an `h x w` image.
    ///
    /// Requires `h >= 2` and `w >= 2` (guaranteed by the `LightField`
    /// invariants) and finite coordinates.
    pub fn at(h: usize, w: usize, py: f64, px: f64) -> Self {
        let (y0, fy, y_active) = axis_cell(h, py);
        let (x0, fx, x_active) = axis_cell(w, px);
        BilinearTap {
            y0,
            y1: y0 + 1,
            x0,
            x1: x0 + 1,
            fy,
            fx,
            y_active,
            x_active,
        }
    }

    /// Interpolated value from a single-channel view.
    ///
    /// Uses the corner-weight form rather than nested lerps so that a weight
    /// of exactly one reproduces the stored value bit-identically.
    #[inline]
    pub fn sample(&self, img: &ArrayView2<'_, f64>) -> f64 {
        let v00 = img[[self.y0, self.x0]];
        let v01 = img[[self.y0, self.x1]];
        let v10 = img[[self.y1, self.x0]];
        let v11 = img[[self.y1, self.x1]];
        let (w00, w01, w10, w11) = self.weights();
        w00 * v00 + w01 * v01 + w10 * v10 + w11 * v11
    }

    /// Partial derivatives of the sampled value with respect to the unclamped
    /// position, `(d/dpy, d/dpx)`.
    #[inline]
    pub fn sample_grad(&self, img: &ArrayView2<'_, f64>) -> (f64, f64) {
        let v00 = img[[self.y0, self.x0]];
        let v01 = img[[self.y0, self.x1]];
        let v10 = img[[self.y1, self.x0]];
        let v11 = img[[self.y1, self.x1]];
        let dy = if self.y_active {
            (1.0 - self.fx) * (v10 - v00) + self.fx * (v11 - v01)
        } else {
            0.0
        };
        let dx = if self.x_active {
            (1.0 - self.fy) * (v01 - v00) + self.fy * (v11 - v10)
        } else {
            0.0
        };
        (dy, dx)
    }

    /// Corner weights in `(w00, w01, w10, w11)` order, summing to one.
    #[inline]
    pub fn weights(&self) -> (f64, f64, f64, f64) {
        let wy0 = 1.0 - self.fy;
        let wx0 = 1.0 - self.fx;
        (
            wy0 * wx0,
            wy0 * self.fx,
            self.fy * wx0,
            self.fy * self.fx,
        )
    }

    /// Sample from a row-major `(h, w, c)` buffer at channel `ch`.
    ///
    /// Flat-slice twin of [`BilinearTap::sample`] for hot loops where
    /// per-element ndarray indexing dominates the cost.
    #[inline]
    pub fn sample_packed(&self, data: &[f64], w: usize, c: usize, ch: usize) -> f64 {
        let i00 = (self.y0 * w + self.x0) * c + ch;
        let i01 = (self.y0 * w + self.x1) * c + ch;
        let i10 = (self.y1 * w + self.x0) * c + ch;
        let i11 = (self.y1 * w + self.x1) * c + ch;
        let (w00, w01, w10, w11) = self.weights();
        w00 * data[i00] + w01 * data[i01] + w10 * data[i10] + w11 * data[i11]
    }

    /// Flat-slice twin of [`BilinearTap::sample_grad`].
    #[inline]
    pub fn sample_grad_packed(
        &self,
        data: &[f64],
        w: usize,
        c: usize,
        ch: usize,
    ) -> (f64, f64) {
        let v00 = data[(self.y0 * w + self.x0) * c + ch];
        let v01 = data[(self.y0 * w + self.x1) * c + ch];
        let v10 = data[(self.y1 * w + self.x0) * c + ch];
        let v11 = data[(self.y1 * w + self.x1) * c + ch];
        let dy = if self.y_active {
            (1.0 - self.fx) * (v10 - v00) + self.fx * (v11 - v01)
        } else {
            0.0
        };
        let dx = if self.x_active {
            (1.0 - self.fy) * (v01 - v00) + self.fy * (v11 - v10)
        } else {
            0.0
        };
        (dy, dx)
    }
}

#[inline]
fn axis_cell(n: usize, p: f64) -> (usize, f64, bool) {
    debug_assert!(n >= 2);
    let active = p > 0.0 && p < (n - 1) as f64;
    let pc = p.clamp(0.0, (n - 1) as f64);
    // ceil-1 picks the lower/left cell at exact integer coordinates.
    let i0 = (pc.ceil() as isize - 1).clamp(0, n as isize - 2) as usize;
    (i0, pc - i0 as f64, active)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn integer_positions_reproduce_values_exactly() {
        let img = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]];
        for y in 0..3 {
            for x in 0..3 {
                let t = BilinearTap::at(3, 3, y as f64, x as f64);
                assert_eq!(t.sample(&img.view()), img[[y, x]]);
            }
        }
    }

    #[test]
    fn clamps_to_edge() {
        let img = array![[1.0, 2.0], [3.0, 4.0]];
        let t = BilinearTap::at(2, 2, -5.0, 0.5);
        assert_eq!(t.sample(&img.view()), 1.5);
        let t = BilinearTap::at(2, 2, 3.0, 1.0);
        assert_eq!(t.sample(&img.view()), 4.0);
    }

    #[test]
    fn derivative_vanishes_outside_image() {
        let img = array![[1.0, 2.0], [3.0, 4.0]];
        let t = BilinearTap::at(2, 2, -0.5, 0.5);
        let (dy, dx) = t.sample_grad(&img.view());
        assert_eq!(dy, 0.0);
        assert!(dx != 0.0);
    }

    #[test]
    fn exact_integer_uses_lower_cell_derivative() {
        // Values with different slopes left and right of x = 1.
        let img = array![[0.0, 1.0, 5.0], [0.0, 1.0, 5.0]];
        let t = BilinearTap::at(2, 3, 0.5, 1.0);
        let (_, dx) = t.sample_grad(&img.view());
        assert_eq!(dx, 1.0, "left cell slope expected at the cell boundary");
    }

    #[test]
    fn derivative_matches_finite_differences_in_cell_interior() {
        let img = array![
            [0.3, 0.9, 0.1, 0.4],
            [0.8, 0.2, 0.7, 0.6],
            [0.1, 0.5, 0.9, 0.2],
            [0.4, 0.7, 0.3, 0.8]
        ];
        let h = 1e-6;
        for &(py, px) in &[(0.35, 1.6), (1.25, 2.4), (2.7, 0.3)] {
            let t = BilinearTap::at(4, 4, py, px);
            let (dy, dx) = t.sample_grad(&img.view());
            let fy = (BilinearTap::at(4, 4, py + h, px).sample(&img.view())
                - BilinearTap::at(4, 4, py - h, px).sample(&img.view()))
                / (2.0 * h);
            let fx = (BilinearTap::at(4, 4, py, px + h).sample(&img.view())
                - BilinearTap::at(4, 4, py, px - h).sample(&img.view()))
                / (2.0 * h);
            assert!((dy - fy).abs() < 1e-8, "dy {dy} vs fd {fy}");
            assert!((dx - fx).abs() < 1e-8, "dx {dx} vs fd {fx}");
        }
    }
}
