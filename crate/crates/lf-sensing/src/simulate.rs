//! Forward simulation: project a light field to coded measurements.

use ndarray::Array3;

use lf_core::{AngularOffset, Image, LightField};

use crate::error::{Result, SensingError};
use crate::gen::{gen_defocus_model, gen_pinhole_model};
use crate::model::{CodedImage, CodedModel, Provenance};

/// Discrete forward model: `I_c(x) = sum_v f(x, v) * L(x, v)`, divided by
/// the per-pixel weight sum when the model is normalized. The sum runs over
/// views in storage order, so results are independent of any caller-side
/// parallelism.
pub fn simulate(lf: &LightField, model: &CodedModel) -> Result<CodedImage> {
    let (a_u, a_v) = lf.angular_extents();
    let (h, w) = lf.spatial_extents();
    let c = lf.channels();
    let me = model.extents();
    if me != (a_u, a_v, h, w) {
        return Err(SensingError::ExtentMismatch {
            lf: vec![a_u, a_v, h, w],
            model: vec![me.0, me.1, me.2, me.3],
        });
    }
    model.check_weight_sum()?;

    let mut out = Array3::<f64>::zeros((h, w, c));
    let acc = out.as_slice_mut().expect("contiguous output");
    for iu in 0..a_u {
        for iv in 0..a_v {
            let view = lf.data().index_axis(ndarray::Axis(0), iu);
            let view = view.index_axis_move(ndarray::Axis(0), iv);
            let view = view.as_slice().expect("contiguous view");
            let wmap = model.weights.index_axis(ndarray::Axis(0), iu);
            let wmap = wmap.index_axis_move(ndarray::Axis(0), iv);
            let wmap = wmap.as_slice().expect("contiguous weights");
            for p in 0..h * w {
                let weight = wmap[p];
                for ch in 0..c {
                    acc[p * c + ch] += weight * view[p * c + ch];
                }
            }
        }
    }
    if model.normalize {
        let sums = model.weight_sum();
        let sums = sums.as_slice().expect("contiguous sums");
        for p in 0..h * w {
            for ch in 0..c {
                acc[p * c + ch] /= sums[p];
            }
        }
    }
    Ok(CodedImage {
        data: out,
        normalized: model.normalize,
        provenance: Provenance::Known(model.provenance.clone()),
    })
}

/// Dual-exposure capture: the all-in-focus (pinhole) centerview plus the
/// wide-aperture defocus image.
pub fn capture_focus_defocus(lf: &LightField) -> Result<(Image, CodedImage)> {
    let allinfocus = lf.get_view(AngularOffset::CENTER)?;
    let (a_u, a_v) = lf.angular_extents();
    let (h, w) = lf.spatial_extents();
    let defocus = simulate(lf, &gen_defocus_model(a_u, a_v, h, w)?)?;
    Ok((allinfocus, defocus))
}

/// The pinhole capture as a provenance-carrying measurement (identical pixel
/// data to the centerview).
pub fn capture_pinhole(lf: &LightField) -> Result<CodedImage> {
    let (a_u, a_v) = lf.angular_extents();
    let (h, w) = lf.spatial_extents();
    simulate(lf, &gen_pinhole_model(a_u, a_v, h, w)?)
}
