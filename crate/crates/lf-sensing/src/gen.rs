//! Weight-map generators for the four capture schemes.

use ndarray::{Array2, Array4};

use crate::error::{Result, SensingError};
use crate::model::{CodeProvenance, CodedModel, SchemeKind};
use crate::rng::CodeRng;

/// Gaussian code parameters for the heterodyne mask: values are drawn from
/// `N(0.5, 0.25^2)` and clipped to `[0, 1]`, which clips about 4.6% of the
/// mass (the two-sided tail beyond two standard deviations).
pub const CLF_CODE_MEAN: f64 = 0.5;
pub const CLF_CODE_STD: f64 = 0.25;

fn check_angular(a_u: usize, a_v: usize) -> Result<()> {
    if a_u == 0 || a_v == 0 || a_u % 2 == 0 || a_v % 2 == 0 {
        return Err(SensingError::Config(format!(
            "angular extents must be odd and positive, got {a_u}x{a_v}"
        )));
    }
    Ok(())
}

/// Round through f32 so the serialized f32 payload is lossless.
#[inline]
fn f32_exact(v: f64) -> f64 {
    v as f32 as f64
}

/// Heterodyne (mask-near-sensor) model: one `tile x tile` Gaussian code
/// tiled over the sensor, cyclically shifted by `shift_per_view` pixels per
/// unit angular offset for each view.
pub fn gen_clf_model(
    a_u: usize,
    a_v: usize,
    height: usize,
    width: usize,
    tile: usize,
    seed: u64,
    shift_per_view: i64,
    normalize: bool,
) -> Result<CodedModel> {
    check_angular(a_u, a_v)?;
    if tile < 1 {
        return Err(SensingError::Config("tile must be at least 1".into()));
    }
    if tile > height.min(width) {
        return Err(SensingError::Config(format!(
            "tile {tile} exceeds the smaller spatial extent {}",
            height.min(width)
        )));
    }

    // Base code tile, filled row-major from the seeded stream.
    let mut rng = CodeRng::new(seed);
    let code = Array2::from_shape_fn((tile, tile), |_| {
        f32_exact((CLF_CODE_MEAN + CLF_CODE_STD * rng.next_gaussian()).clamp(0.0, 1.0))
    });

    let cu = (a_u as i64 - 1) / 2;
    let cv = (a_v as i64 - 1) / 2;
    let t = tile as i64;
    let mut weights = Array4::zeros((a_u, a_v, height, width));
    for iu in 0..a_u {
        for iv in 0..a_v {
            let q_u = iu as i64 - cu;
            let q_v = iv as i64 - cv;
            // Cyclic shift by +shift*q moves the pattern content with the
            // view, so the weight at (y, x) reads the base tile at
            // (y - shift*q_u, x - shift*q_v) modulo the tile period.
            let sy = shift_per_view * q_u;
            let sx = shift_per_view * q_v;
            for y in 0..height {
                for x in 0..width {
                    let ty = (y as i64 - sy).rem_euclid(t) as usize;
                    let tx = (x as i64 - sx).rem_euclid(t) as usize;
                    weights[[iu, iv, y, x]] = code[[ty, tx]];
                }
            }
        }
    }

    let prov = CodeProvenance::new(
        SchemeKind::Clf,
        (a_u, a_v, height, width),
        Some(seed),
        Some(tile),
        Some(shift_per_view),
        normalize,
    );
    Ok(CodedModel::new(weights, normalize, prov))
}

/// Coded-aperture model: one uniform `[0, 1]` weight per view, spatially
/// constant, drawn row-major over `(u, v)`.
pub fn gen_aperture_model(
    a_u: usize,
    a_v: usize,
    height: usize,
    width: usize,
    seed: u64,
    normalize: bool,
) -> Result<CodedModel> {
    check_angular(a_u, a_v)?;
    let mut rng = CodeRng::new(seed);
    let mut weights = Array4::zeros((a_u, a_v, height, width));
    for iu in 0..a_u {
        for iv in 0..a_v {
            let w = f32_exact(rng.next_uniform());
            weights
                .index_axis_mut(ndarray::Axis(0), iu)
                .index_axis_mut(ndarray::Axis(0), iv)
                .fill(w);
        }
    }
    let prov = CodeProvenance::new(
        SchemeKind::CodedAperture,
        (a_u, a_v, height, width),
        Some(seed),
        None,
        None,
        normalize,
    );
    Ok(CodedModel::new(weights, normalize, prov))
}

/// Wide-aperture capture: every view weighted `1 / (A_u * A_v)`.
pub fn gen_defocus_model(a_u: usize, a_v: usize, height: usize, width: usize) -> Result<CodedModel> {
    check_angular(a_u, a_v)?;
    let w = f32_exact(1.0 / (a_u * a_v) as f64);
    let weights = Array4::from_elem((a_u, a_v, height, width), w);
    let prov = CodeProvenance::new(
        SchemeKind::Defocus,
        (a_u, a_v, height, width),
        None,
        None,
        None,
        true,
    );
    Ok(CodedModel::new(weights, true, prov))
}

/// Narrow-aperture capture: weight one on the center view, zero elsewhere.
pub fn gen_pinhole_model(a_u: usize, a_v: usize, height: usize, width: usize) -> Result<CodedModel> {
    check_angular(a_u, a_v)?;
    let mut weights = Array4::zeros((a_u, a_v, height, width));
    weights
        .index_axis_mut(ndarray::Axis(0), (a_u - 1) / 2)
        .index_axis_mut(ndarray::Axis(0), (a_v - 1) / 2)
        .fill(1.0);
    let prov = CodeProvenance::new(
        SchemeKind::Pinhole,
        (a_u, a_v, height, width),
        None,
        None,
        None,
        true,
    );
    Ok(CodedModel::new(weights, true, prov))
}

/// Rebuild a model from recorded provenance; the result is bit-identical to
/// the original generator call.
pub fn regenerate(prov: &CodeProvenance) -> Result<CodedModel> {
    let (a_u, a_v, h, w) = (prov.a_u, prov.a_v, prov.height, prov.width);
    match prov.scheme {
        SchemeKind::Clf => gen_clf_model(
            a_u,
            a_v,
            h,
            w,
            prov.tile
                .ok_or_else(|| SensingError::Config("clf provenance lacks tile".into()))?,
            prov.seed
                .ok_or_else(|| SensingError::Config("clf provenance lacks seed".into()))?,
            prov.shift_per_view
                .ok_or_else(|| SensingError::Config("clf provenance lacks shift".into()))?,
            prov.normalize,
        ),
        SchemeKind::CodedAperture => gen_aperture_model(
            a_u,
            a_v,
            h,
            w,
            prov.seed
                .ok_or_else(|| SensingError::Config("aperture provenance lacks seed".into()))?,
            prov.normalize,
        ),
        SchemeKind::Defocus => gen_defocus_model(a_u, a_v, h, w),
        SchemeKind::Pinhole => gen_pinhole_model(a_u, a_v, h, w),
    }
}
