//! Coarse-to-fine pyramids: factor-2 mean pooling on the way down and
//! bilinear disparity upsampling (with pixel-unit rescaling) on the way up.

use ndarray::{Array2, Array3, Array4, Array5};

use lf_core::interp::BilinearTap;
use lf_core::{Image, LightField};
use lf_sensing::{CodedImage, CodedModel};
use lf_warp::DisparityField;

use crate::error::Result;

/// Smallest spatial extent allowed at the coarsest pyramid level.
pub const MIN_COARSE_EXTENT: usize = 8;

/// Number of levels actually usable for the given spatial extents: the
/// coarsest level must stay at least `MIN_COARSE_EXTENT` on both axes.
pub fn effective_levels(requested: usize, height: usize, width: usize) -> usize {
    let mut levels = 1;
    let (mut h, mut w) = (height, width);
    while levels < requested {
        let (nh, nw) = (h.div_ceil(2), w.div_ceil(2));
        if nh < MIN_COARSE_EXTENT || nw < MIN_COARSE_EXTENT {
            break;
        }
        h = nh;
        w = nw;
        levels += 1;
    }
    levels
}

/// Binomial smooth-and-decimate (Burt-Adelson style): a separable
/// [1 4 6 4 1]/16 blur with clamped borders, then subsampling by two. Plain
/// box pooling aliases texture above the coarse Nyquist rate into per-view
/// noise that the coarse solves then fit with spurious disparities.
fn pool2<F>(h: usize, w: usize, get: F) -> Array2<f64>
where
    F: Fn(usize, usize) -> f64,
{
    const K: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
    let clamp = |v: i64, n: usize| v.clamp(0, n as i64 - 1) as usize;
    let mut rows = Array2::zeros((h, w));
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in K.iter().enumerate() {
                acc += k * get(y, clamp(x as i64 + i as i64 - 2, w));
            }
            rows[[y, x]] = acc;
        }
    }
    let (nh, nw) = (h.div_ceil(2), w.div_ceil(2));
    Array2::from_shape_fn((nh, nw), |(y, x)| {
        let mut acc = 0.0;
        for (i, k) in K.iter().enumerate() {
            acc += k * rows[[clamp(2 * y as i64 + i as i64 - 2, h), 2 * x]];
        }
        acc
    })
}

pub fn downscale_image(img: &Image) -> Image {
    let (h, w, c) = img.dim();
    let mut planes = Vec::with_capacity(c);
    for ch in 0..c {
        planes.push(pool2(h, w, |y, x| img[[y, x, ch]]));
    }
    let (nh, nw) = planes[0].dim();
    Array3::from_shape_fn((nh, nw, c), |(y, x, ch)| planes[ch][[y, x]])
}

pub fn downscale_light_field(lf: &LightField) -> Result<LightField> {
    let (a_u, a_v) = lf.angular_extents();
    let (h, w) = lf.spatial_extents();
    let c = lf.channels();
    let (nh, nw) = (h.div_ceil(2), w.div_ceil(2));
    let mut data = Array5::zeros((a_u, a_v, nh, nw, c));
    for iu in 0..a_u {
        for iv in 0..a_v {
            for ch in 0..c {
                let pooled = pool2(h, w, |y, x| lf.data()[[iu, iv, y, x, ch]]);
                for y in 0..nh {
                    for x in 0..nw {
                        data[[iu, iv, y, x, ch]] = pooled[[y, x]];
                    }
                }
            }
        }
    }
    Ok(LightField::new(data)?)
}

/// Pool a coded model's weight maps. Constant-per-view schemes pool exactly;
/// for the spatially varying heterodyne code this is an approximation of the
/// coarse-scale operator used only to seed the next finer level.
pub fn downscale_model(model: &CodedModel) -> CodedModel {
    let (a_u, a_v, h, w) = model.extents();
    let (nh, nw) = (h.div_ceil(2), w.div_ceil(2));
    let mut weights = Array4::zeros((a_u, a_v, nh, nw));
    for iu in 0..a_u {
        for iv in 0..a_v {
            let pooled = pool2(h, w, |y, x| model.weights[[iu, iv, y, x]]);
            for y in 0..nh {
                for x in 0..nw {
                    weights[[iu, iv, y, x]] = pooled[[y, x]];
                }
            }
        }
    }
    CodedModel {
        weights,
        normalize: model.normalize,
        provenance: model.provenance.clone(),
    }
}

pub fn downscale_coded_image(img: &CodedImage) -> CodedImage {
    CodedImage {
        data: downscale_image(&img.data),
        normalized: img.normalized,
        provenance: img.provenance.clone(),
    }
}

/// Upsample a disparity field to the target spatial extents, scaling the
/// values by the resolution ratio (disparities are in pixel units, so they
/// double when the resolution doubles).
pub fn upsample_disparity(
    field: &DisparityField,
    target_h: usize,
    target_w: usize,
    d_max: f64,
) -> Result<DisparityField> {
    let (a_u, a_v) = field.angular_extents();
    let (h, w) = field.spatial_extents();
    let ratio_y = target_h as f64 / h as f64;
    let ratio_x = target_w as f64 / w as f64;
    let value_scale = 0.5 * (ratio_y + ratio_x);
    let mut out = Array4::zeros((a_u, a_v, target_h, target_w));
    for iu in 0..a_u {
        for iv in 0..a_v {
            let src = field
                .values()
                .index_axis(ndarray::Axis(0), iu)
                .index_axis_move(ndarray::Axis(0), iv);
            for y in 0..target_h {
                for x in 0..target_w {
                    // Half-pixel-center mapping between the grids.
                    let sy = (y as f64 + 0.5) / ratio_y - 0.5;
                    let sx = (x as f64 + 0.5) / ratio_x - 0.5;
                    let tap = BilinearTap::at(h, w, sy, sx);
                    out[[iu, iv, y, x]] =
                        (tap.sample(&src) * value_scale).clamp(-d_max, d_max);
                }
            }
        }
    }
    Ok(DisparityField::with_limit(out, d_max)?)
}
