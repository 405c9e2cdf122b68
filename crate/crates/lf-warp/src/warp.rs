//! Backward warping of the centerview through disparity maps.
//!
//! The view at angular offset `q` samples the centerview at
//! `(y + q_u * D(y, x), x + q_v * D(y, x))` with bilinear clamp-to-edge
//! interpolation: positive disparity displaces the sampling location in the
//! positive offset direction, so content in front of the focal plane carries
//! positive disparity. One scalar disparity scales both displacement
//! components.

use ndarray::{Array2, Array3, Array5, ArrayView2, ArrayView3};

use lf_core::interp::BilinearTap;
use lf_core::{light_field_from_valid_parts, AngularOffset, Image, LightField};

use crate::disparity::{DisparityField, DisparityMap, WarpGradient};
use crate::error::{Result, WarpError};

fn check_spatial(
    what: &'static str,
    expected: (usize, usize),
    got: (usize, usize),
) -> Result<()> {
    if expected != got {
        return Err(WarpError::ShapeMismatch {
            what,
            expected: vec![expected.0, expected.1],
            got: vec![got.0, got.1],
        });
    }
    Ok(())
}

/// Warp the centerview to the view at offset `q` through one disparity map.
pub fn warp_view(center: &ArrayView3<'_, f64>, disp: &ArrayView2<'_, f64>, q: AngularOffset) -> Result<Image> {
    let (h, w, c) = center.dim();
    check_spatial("disparity map", (h, w), disp.dim())?;
    let mut out = Array3::zeros((h, w, c));
    warp_view_into(center, disp, q, &mut out.view_mut());
    Ok(out)
}

pub(crate) fn warp_view_into(
    center: &ArrayView3<'_, f64>,
    disp: &ArrayView2<'_, f64>,
    q: AngularOffset,
    out: &mut ndarray::ArrayViewMut3<'_, f64>,
) {
    let (h, w, c) = center.dim();
    let qu = q.u as f64;
    let qv = q.v as f64;
    // Flat row-major fast path; falls back to ndarray indexing for
    // non-contiguous views.
    if let (Some(src), Some(dsp)) = (center.as_slice(), disp.as_slice()) {
        if let Some(dst) = out.as_slice_mut() {
            for y in 0..h {
                for x in 0..w {
                    let d = dsp[y * w + x];
                    let tap = BilinearTap::at(h, w, y as f64 + qu * d, x as f64 + qv * d);
                    let base = (y * w + x) * c;
                    for ch in 0..c {
                        dst[base + ch] = tap.sample_packed(src, w, c, ch);
                    }
                }
            }
            return;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let d = disp[[y, x]];
            let tap = BilinearTap::at(h, w, y as f64 + qu * d, x as f64 + qv * d);
            for ch in 0..c {
                let plane = center.index_axis(ndarray::Axis(2), ch);
                out[[y, x, ch]] = tap.sample(&plane);
            }
        }
    }
}

/// Render the full light field by warping the centerview to every view.
///
/// The center view of the output reproduces `center` exactly: at `q = (0,0)`
/// the displacement is zero regardless of the disparity values.
pub fn render_lf(center: &Image, dfield: &DisparityField) -> Result<LightField> {
    let (h, w, c) = center.dim();
    check_spatial("center image", dfield.spatial_extents(), (h, w))?;
    if let Some(bad) = center.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
        return Err(WarpError::InvalidCenter(*bad));
    }
    let (a_u, a_v) = dfield.angular_extents();
    let mut data = Array5::zeros((a_u, a_v, h, w, c));
    for iu in 0..a_u {
        for iv in 0..a_v {
            let q = dfield.index_to_offset(iu, iv);
            let disp = dfield
                .values()
                .index_axis(ndarray::Axis(0), iu)
                .index_axis_move(ndarray::Axis(0), iv);
            let mut out = data
                .index_axis_mut(ndarray::Axis(0), iu)
                .index_axis_move(ndarray::Axis(0), iv);
            warp_view_into(&center.view(), &disp, q, &mut out);
        }
    }
    Ok(light_field_from_valid_parts(data))
}

/// Sample the disparity map of view `v + q` at positions displaced by
/// `-q * D(x, v)`: the quantity compared against `D(x, v)` by the
/// disparity-consistency term.
pub fn warp_consistency_sample(
    dfield: &DisparityField,
    v: AngularOffset,
    q: AngularOffset,
) -> Result<DisparityMap> {
    let source = dfield.map_at(v)?;
    let target = dfield.map_at(AngularOffset::new(v.u + q.u, v.v + q.v))?;
    let (h, w) = dfield.spatial_extents();
    let mut out = Array2::zeros((h, w));
    let qu = q.u as f64;
    let qv = q.v as f64;
    for y in 0..h {
        for x in 0..w {
            let d = source[[y, x]];
            let tap = BilinearTap::at(h, w, y as f64 - qu * d, x as f64 - qv * d);
            out[[y, x]] = tap.sample(&target);
        }
    }
    Ok(out)
}

/// Analytic derivative of `sum(upstream * warp_view(center, disp, q))` with
/// respect to each disparity value.
///
/// Chain rule through the bilinear interpolant: the derivative of the sample
/// with respect to the disparity at `(y, x)` is
/// `q_u * dI/dpy + q_v * dI/dpx` evaluated from the cell corner differences,
/// exact for the piecewise-bilinear interpolant away from cell boundaries.
pub fn warp_view_grad(
    center: &ArrayView3<'_, f64>,
    disp: &ArrayView2<'_, f64>,
    q: AngularOffset,
    upstream: &ArrayView3<'_, f64>,
) -> Result<DisparityMap> {
    let (h, w, c) = center.dim();
    check_spatial("disparity map", (h, w), disp.dim())?;
    if upstream.dim() != (h, w, c) {
        let d = upstream.dim();
        return Err(WarpError::ShapeMismatch {
            what: "upstream",
            expected: vec![h, w, c],
            got: vec![d.0, d.1, d.2],
        });
    }
    let mut out = Array2::zeros((h, w));
    accumulate_warp_view_grad(center, disp, q, upstream, &mut out.view_mut());
    Ok(out)
}

pub(crate) fn accumulate_warp_view_grad(
    center: &ArrayView3<'_, f64>,
    disp: &ArrayView2<'_, f64>,
    q: AngularOffset,
    upstream: &ArrayView3<'_, f64>,
    out: &mut ndarray::ArrayViewMut2<'_, f64>,
) {
    let (h, w, c) = center.dim();
    let qu = q.u as f64;
    let qv = q.v as f64;
    if let (Some(src), Some(dsp), Some(up)) =
        (center.as_slice(), disp.as_slice(), upstream.as_slice())
    {
        if let Some(dst) = out.as_slice_mut() {
            for y in 0..h {
                for x in 0..w {
                    let d = dsp[y * w + x];
                    let tap = BilinearTap::at(h, w, y as f64 + qu * d, x as f64 + qv * d);
                    let base = (y * w + x) * c;
                    let mut acc = 0.0;
                    for ch in 0..c {
                        let (dy, dx) = tap.sample_grad_packed(src, w, c, ch);
                        acc += up[base + ch] * (qu * dy + qv * dx);
                    }
                    dst[y * w + x] += acc;
                }
            }
            return;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let d = disp[[y, x]];
            let tap = BilinearTap::at(h, w, y as f64 + qu * d, x as f64 + qv * d);
            let mut acc = 0.0;
            for ch in 0..c {
                let plane = center.index_axis(ndarray::Axis(2), ch);
                let (dy, dx) = tap.sample_grad(&plane);
                acc += upstream[[y, x, ch]] * (qu * dy + qv * dx);
            }
            out[[y, x]] += acc;
        }
    }
}

/// Convenience wrapper taking owned-array references.
pub fn warp_view_owned(center: &Image, disp: &DisparityMap, q: AngularOffset) -> Result<Image> {
    warp_view(&center.view(), &disp.view(), q)
}

/// Gradient accumulation across a whole field: applies
/// [`warp_view_grad`] per view with per-view upstreams and sums into a
/// [`WarpGradient`] in storage order.
pub fn render_lf_grad(
    center: &Image,
    dfield: &DisparityField,
    upstream_per_view: &Array5<f64>,
) -> Result<WarpGradient> {
    let (a_u, a_v) = dfield.angular_extents();
    let (h, w, c) = center.dim();
    if upstream_per_view.dim() != (a_u, a_v, h, w, c) {
        let d = upstream_per_view.dim();
        return Err(WarpError::ShapeMismatch {
            what: "upstream field",
            expected: vec![a_u, a_v, h, w, c],
            got: vec![d.0, d.1, d.2, d.3, d.4],
        });
    }
    let mut grad = WarpGradient::zeros_like(dfield);
    for iu in 0..a_u {
        for iv in 0..a_v {
            let q = dfield.index_to_offset(iu, iv);
            let disp = dfield
                .values()
                .index_axis(ndarray::Axis(0), iu)
                .index_axis_move(ndarray::Axis(0), iv);
            let upstream = upstream_per_view
                .index_axis(ndarray::Axis(0), iu)
                .index_axis_move(ndarray::Axis(0), iv);
            let mut out = grad.view_mut_at(iu, iv);
            accumulate_warp_view_grad(&center.view(), &disp, q, &upstream, &mut out);
        }
    }
    Ok(grad)
}

/// Gradient plus diagonal Gauss-Newton curvature of the warp in one pass.
///
/// For each disparity value the warp Jacobian entry is
/// `j_c = q_u * dI_c/dy + q_v * dI_c/dx`; the result accumulates
/// `sum_c g_up * j_c` into the gradient and `sum_c h_up * j_c^2` into the
/// curvature, where `g_up`/`h_up` are the caller's per-entry chain weights.
pub fn render_lf_grad_curv(
    center: &Image,
    dfield: &DisparityField,
    upstream_grad: &Array5<f64>,
    upstream_curv: &Array5<f64>,
) -> Result<(WarpGradient, WarpGradient)> {
    let (a_u, a_v) = dfield.angular_extents();
    let (h, w, c) = center.dim();
    for (what, up) in [("upstream grad", upstream_grad), ("upstream curv", upstream_curv)] {
        if up.dim() != (a_u, a_v, h, w, c) {
            let d = up.dim();
            return Err(WarpError::ShapeMismatch {
                what: if what == "upstream grad" {
                    "upstream grad field"
                } else {
                    "upstream curv field"
                },
                expected: vec![a_u, a_v, h, w, c],
                got: vec![d.0, d.1, d.2, d.3, d.4],
            });
        }
    }
    let src = center.as_slice().expect("contiguous center");
    let mut grad = WarpGradient::zeros_like(dfield);
    let mut curv = WarpGradient::zeros_like(dfield);
    let gv = grad.values.as_slice_mut().expect("contiguous grad");
    let hv = curv.values.as_slice_mut().expect("contiguous curv");
    let dv = dfield.values().as_slice().expect("contiguous field");
    let ug = upstream_grad.as_slice().expect("contiguous upstream");
    let uh = upstream_curv.as_slice().expect("contiguous upstream");
    for iu in 0..a_u {
        for iv in 0..a_v {
            let q = dfield.index_to_offset(iu, iv);
            let qu = q.u as f64;
            let qv = q.v as f64;
            let vbase = (iu * a_v + iv) * h * w;
            let ubase = vbase * c;
            for y in 0..h {
                for x in 0..w {
                    let p = y * w + x;
                    let d = dv[vbase + p];
                    let tap = BilinearTap::at(h, w, y as f64 + qu * d, x as f64 + qv * d);
                    let mut g = 0.0;
                    let mut hh = 0.0;
                    for ch in 0..c {
                        let (dy, dx) = tap.sample_grad_packed(src, w, c, ch);
                        let j = qu * dy + qv * dx;
                        g += ug[ubase + p * c + ch] * j;
                        hh += uh[ubase + p * c + ch] * j * j;
                    }
                    gv[vbase + p] += g;
                    hv[vbase + p] += hh;
                }
            }
        }
    }
    Ok((grad, curv))
}
