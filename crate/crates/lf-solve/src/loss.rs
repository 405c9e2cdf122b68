//! The composite objective: reconstruction (or measurement) residual plus
//! disparity-consistency and total-variation regularizers, all built on the
//! Charbonnier-smoothed absolute value, with analytic gradients with respect
//! to the disparity field.

use ndarray::{Array2, Array5};

use lf_core::interp::BilinearTap;
use lf_core::{AngularOffset, Image, LightField};
use lf_sensing::{CodedImage, CodedModel};
use lf_warp::{render_lf, render_lf_grad, DisparityField, WarpGradient};

use crate::config::{SolveMode, SolverConfig};
use crate::error::{Result, SolveError};

/// Default smoothing of the l1 terms; see [`charbonnier`].
pub const DEFAULT_ROBUST_EPS: f64 = 1e-3;

/// The four immediate-neighbour angular offsets used by the
/// disparity-consistency term by default.
pub const UNIT_OFFSETS: [AngularOffset; 4] = [
    AngularOffset { u: -1, v: 0 },
    AngularOffset { u: 1, v: 0 },
    AngularOffset { u: 0, v: -1 },
    AngularOffset { u: 0, v: 1 },
];

/// `sqrt(r^2 + eps^2) - eps`: a smooth absolute value that is exactly zero
/// at zero.
#[inline]
pub fn charbonnier(r: f64, eps: f64) -> f64 {
    (r * r + eps * eps).sqrt() - eps
}

#[inline]
pub fn charbonnier_deriv(r: f64, eps: f64) -> f64 {
    r / (r * r + eps * eps).sqrt()
}

/// What the data term compares against.
pub enum SolveTarget<'a> {
    /// Ground-truth light field (Eq.-style view synthesis residual).
    Supervised(&'a LightField),
    /// Observed coded images with the models that produced them.
    Measurement {
        models: &'a [CodedModel],
        observed: &'a [CodedImage],
    },
}

impl SolveTarget<'_> {
    pub fn mode(&self) -> SolveMode {
        match self {
            SolveTarget::Supervised(_) => SolveMode::Supervised,
            SolveTarget::Measurement { .. } => SolveMode::Measurement,
        }
    }

    /// Angular extents the disparity field must match.
    pub fn angular_extents(&self) -> Result<(usize, usize)> {
        match self {
            SolveTarget::Supervised(reference) => Ok(reference.angular_extents()),
            SolveTarget::Measurement { models, .. } => {
                let m = models.first().ok_or(SolveError::NoMeasurements)?;
                let e = m.extents();
                Ok((e.0, e.1))
            }
        }
    }
}

/// Loss values of the individual objective terms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LossBreakdown {
    /// Data term: view-synthesis residual in supervised mode, measurement
    /// residual in measurement mode.
    pub rec: f64,
    pub dc: f64,
    pub tv: f64,
    pub total: f64,
}

/// Mean Charbonnier-smoothed l1 between a rendered and a reference light
/// field.
pub fn loss_rec(rendered: &LightField, reference: &LightField) -> Result<f64> {
    loss_rec_with_eps(rendered, reference, DEFAULT_ROBUST_EPS)
}

pub fn loss_rec_with_eps(rendered: &LightField, reference: &LightField, eps: f64) -> Result<f64> {
    if rendered.data().dim() != reference.data().dim() {
        let a = rendered.data().dim();
        let b = reference.data().dim();
        return Err(SolveError::ExtentMismatch {
            what: "reference light field",
            expected: vec![a.0, a.1, a.2, a.3, a.4],
            got: vec![b.0, b.1, b.2, b.3, b.4],
        });
    }
    let n = rendered.data().len() as f64;
    let sum: f64 = rendered
        .data()
        .iter()
        .zip(reference.data().iter())
        .map(|(a, b)| charbonnier(a - b, eps))
        .sum();
    Ok(sum / n)
}

/// Measurement-consistency residual: render the field, push it through each
/// forward model and compare with the observations; mean per measurement,
/// summed over measurements.
pub fn loss_measurement(
    center: &Image,
    dfield: &DisparityField,
    models: &[CodedModel],
    observed: &[CodedImage],
) -> Result<f64> {
    loss_measurement_with_eps(center, dfield, models, observed, DEFAULT_ROBUST_EPS)
}

pub fn loss_measurement_with_eps(
    center: &Image,
    dfield: &DisparityField,
    models: &[CodedModel],
    observed: &[CodedImage],
    eps: f64,
) -> Result<f64> {
    check_measurements(center, dfield, models, observed)?;
    let rendered = render_lf(center, dfield)?;
    let mut total = 0.0;
    for (model, obs) in models.iter().zip(observed) {
        let sim = lf_sensing::simulate(&rendered, model)?;
        let n = sim.data.len() as f64;
        let sum: f64 = sim
            .data
            .iter()
            .zip(obs.data.iter())
            .map(|(a, b)| charbonnier(a - b, eps))
            .sum();
        total += sum / n;
    }
    Ok(total)
}

fn check_measurements(
    center: &Image,
    dfield: &DisparityField,
    models: &[CodedModel],
    observed: &[CodedImage],
) -> Result<()> {
    if models.is_empty() {
        return Err(SolveError::NoMeasurements);
    }
    if models.len() != observed.len() {
        return Err(SolveError::ExtentMismatch {
            what: "models vs observations",
            expected: vec![models.len()],
            got: vec![observed.len()],
        });
    }
    let (h, w, c) = center.dim();
    let (a_u, a_v) = dfield.angular_extents();
    if dfield.spatial_extents() != (h, w) {
        let s = dfield.spatial_extents();
        return Err(SolveError::ExtentMismatch {
            what: "disparity field spatial extents",
            expected: vec![h, w],
            got: vec![s.0, s.1],
        });
    }
    for (model, obs) in models.iter().zip(observed) {
        if model.extents() != (a_u, a_v, h, w) {
            let e = model.extents();
            return Err(SolveError::ExtentMismatch {
                what: "coded model extents",
                expected: vec![a_u, a_v, h, w],
                got: vec![e.0, e.1, e.2, e.3],
            });
        }
        if obs.data.dim() != (h, w, c) {
            let d = obs.data.dim();
            return Err(SolveError::ExtentMismatch {
                what: "observed image extents",
                expected: vec![h, w, c],
                got: vec![d.0, d.1, d.2],
            });
        }
    }
    Ok(())
}

/// Disparity photo-consistency: compares `D(x, v)` with the map of view
/// `v + q` sampled at the disparity-displaced position, averaged over all
/// valid `(v, q)` pairs and pixels.
pub fn loss_dc(dfield: &DisparityField, q_set: &[AngularOffset]) -> Result<f64> {
    loss_dc_with_eps(dfield, q_set, DEFAULT_ROBUST_EPS)
}

pub fn loss_dc_with_eps(
    dfield: &DisparityField,
    q_set: &[AngularOffset],
    eps: f64,
) -> Result<f64> {
    if q_set.is_empty() {
        return Err(SolveError::EmptyOffsetSet);
    }
    let (sum, count) = dc_term_sum(dfield, q_set, eps, None, None);
    if count == 0 {
        return Ok(0.0);
    }
    Ok(sum / count as f64)
}

/// IRLS majorizer weight of the Charbonnier: `rho'(r) / r`.
#[inline]
fn irls_weight(r: f64, eps: f64) -> f64 {
    1.0 / (r * r + eps * eps).sqrt()
}

/// Shared forward/backward walk over the disparity-consistency terms. When
/// `grad` is given, accumulates `d(sum)/dD` (unnormalized) into it; `curv`
/// likewise receives the diagonal Gauss-Newton curvature.
fn dc_term_sum(
    dfield: &DisparityField,
    q_set: &[AngularOffset],
    eps: f64,
    mut grad: Option<&mut WarpGradient>,
    mut curv: Option<&mut WarpGradient>,
) -> (f64, usize) {
    let (a_u, a_v) = dfield.angular_extents();
    let (h, w) = dfield.spatial_extents();
    let mut sum = 0.0;
    let mut count = 0usize;
    for iu in 0..a_u {
        for iv in 0..a_v {
            for q in q_set {
                let tu = iu as i64 + q.u as i64;
                let tv = iv as i64 + q.v as i64;
                if tu < 0 || tu >= a_u as i64 || tv < 0 || tv >= a_v as i64 {
                    continue;
                }
                let (tu, tv) = (tu as usize, tv as usize);
                let values = dfield.values().as_slice().expect("contiguous field");
                let src_base = (iu * a_v + iv) * h * w;
                let tgt_base = (tu * a_v + tv) * h * w;
                let qu = q.u as f64;
                let qv = q.v as f64;
                for y in 0..h {
                    for x in 0..w {
                        let d = values[src_base + y * w + x];
                        let tap =
                            BilinearTap::at(h, w, y as f64 - qu * d, x as f64 - qv * d);
                        let target = &values[tgt_base..tgt_base + h * w];
                        let sampled = tap.sample_packed(target, w, 1, 0);
                        let t = d - sampled;
                        sum += charbonnier(t, eps);
                        if let Some(g) = grad.as_deref_mut() {
                            let rho = charbonnier_deriv(t, eps);
                            // d(sampled)/dd through the displaced position.
                            let (sy, sx) = tap.sample_grad_packed(target, w, 1, 0);
                            let dsample_dd = -(qu * sy + qv * sx);
                            let gv = g.values.as_slice_mut().expect("contiguous grad");
                            gv[src_base + y * w + x] += rho * (1.0 - dsample_dd);
                            // Scatter -rho through the bilinear corner
                            // weights into the target view's gradient.
                            let (w00, w01, w10, w11) = tap.weights();
                            gv[tgt_base + tap.y0 * w + tap.x0] -= rho * w00;
                            gv[tgt_base + tap.y0 * w + tap.x1] -= rho * w01;
                            gv[tgt_base + tap.y1 * w + tap.x0] -= rho * w10;
                            gv[tgt_base + tap.y1 * w + tap.x1] -= rho * w11;
                            if let Some(hc) = curv.as_deref_mut() {
                                let iw = irls_weight(t, eps);
                                let dtd = 1.0 - dsample_dd;
                                let hv =
                                    hc.values.as_slice_mut().expect("contiguous curv");
                                hv[src_base + y * w + x] += iw * dtd * dtd;
                                hv[tgt_base + tap.y0 * w + tap.x0] += iw * w00 * w00;
                                hv[tgt_base + tap.y0 * w + tap.x1] += iw * w01 * w01;
                                hv[tgt_base + tap.y1 * w + tap.x0] += iw * w10 * w10;
                                hv[tgt_base + tap.y1 * w + tap.x1] += iw * w11 * w11;
                            }
                        }
                    }
                }
                count += h * w;
            }
        }
    }
    (sum, count)
}

/// Anisotropic total variation of the disparity maps: smoothed l1 of the
/// forward spatial differences, averaged per difference term and over views.
pub fn loss_tv(dfield: &DisparityField) -> f64 {
    loss_tv_with_eps(dfield, DEFAULT_ROBUST_EPS)
}

pub fn loss_tv_with_eps(dfield: &DisparityField, eps: f64) -> f64 {
    let (sum, count) = tv_term_sum(dfield, eps, None, None);
    if count == 0 {
        return 0.0;
    }
    sum / count as f64
}

fn tv_term_sum(
    dfield: &DisparityField,
    eps: f64,
    mut grad: Option<&mut WarpGradient>,
    mut curv: Option<&mut WarpGradient>,
) -> (f64, usize) {
    let (a_u, a_v) = dfield.angular_extents();
    let (h, w) = dfield.spatial_extents();
    let mut sum = 0.0;
    let values = dfield.values().as_slice().expect("contiguous field");
    for iu in 0..a_u {
        for iv in 0..a_v {
            let base = (iu * a_v + iv) * h * w;
            for y in 0..h {
                for x in 0..w {
                    let p = base + y * w + x;
                    if x + 1 < w {
                        let t = values[p + 1] - values[p];
                        sum += charbonnier(t, eps);
                        if let Some(g) = grad.as_deref_mut() {
                            let rho = charbonnier_deriv(t, eps);
                            let gv = g.values.as_slice_mut().expect("contiguous grad");
                            gv[p + 1] += rho;
                            gv[p] -= rho;
                        }
                        if let Some(hc) = curv.as_deref_mut() {
                            let iw = irls_weight(t, eps);
                            let hv = hc.values.as_slice_mut().expect("contiguous curv");
                            hv[p + 1] += iw;
                            hv[p] += iw;
                        }
                    }
                    if y + 1 < h {
                        let t = values[p + w] - values[p];
                        sum += charbonnier(t, eps);
                        if let Some(g) = grad.as_deref_mut() {
                            let rho = charbonnier_deriv(t, eps);
                            let gv = g.values.as_slice_mut().expect("contiguous grad");
                            gv[p + w] += rho;
                            gv[p] -= rho;
                        }
                        if let Some(hc) = curv.as_deref_mut() {
                            let iw = irls_weight(t, eps);
                            let hv = hc.values.as_slice_mut().expect("contiguous curv");
                            hv[p + w] += iw;
                            hv[p] += iw;
                        }
                    }
                }
            }
        }
    }
    let per_view = h * (w - 1) + (h - 1) * w;
    (sum, per_view * a_u * a_v)
}

/// Evaluate the full objective
/// `data + lambda_dc * dc + lambda_tv * tv` without gradients.
pub fn total_loss(
    center: &Image,
    dfield: &DisparityField,
    config: &SolverConfig,
    target: &SolveTarget<'_>,
) -> Result<LossBreakdown> {
    check_mode(config, target)?;
    let eps = config.robust_eps;
    let rec = match target {
        SolveTarget::Supervised(reference) => {
            let rendered = render_lf(center, dfield)?;
            loss_rec_with_eps(&rendered, reference, eps)?
        }
        SolveTarget::Measurement { models, observed } => {
            loss_measurement_with_eps(center, dfield, models, observed, eps)?
        }
    };
    let dc = loss_dc_with_eps(dfield, &UNIT_OFFSETS, eps)?;
    let tv = loss_tv_with_eps(dfield, eps);
    Ok(LossBreakdown {
        rec,
        dc,
        tv,
        total: rec + config.lambda_dc * dc + config.lambda_tv * tv,
    })
}

/// Evaluate the full objective and its gradient with respect to every
/// disparity value.
pub fn total_loss_and_grad(
    center: &Image,
    dfield: &DisparityField,
    config: &SolverConfig,
    target: &SolveTarget<'_>,
) -> Result<(LossBreakdown, WarpGradient)> {
    let (losses, grad, _) = evaluate_full(center, dfield, config, target, false)?;
    Ok((losses, grad))
}

/// Full evaluation: loss breakdown, gradient, and (optionally) the diagonal
/// Gauss-Newton curvature of the objective, which the solver uses as its
/// per-coordinate step scale.
pub(crate) fn evaluate_full(
    center: &Image,
    dfield: &DisparityField,
    config: &SolverConfig,
    target: &SolveTarget<'_>,
    with_curv: bool,
) -> Result<(LossBreakdown, WarpGradient, Option<WarpGradient>)> {
    check_mode(config, target)?;
    let eps = config.robust_eps;
    let (h, w, c) = center.dim();
    let (a_u, a_v) = dfield.angular_extents();

    let rendered = render_lf(center, dfield)?;

    // Data term: build per-entry chain weights d(loss)/d(rendered) for the
    // gradient, and the corresponding IRLS weights for the curvature, then
    // push both through the warp Jacobian.
    let mut up_grad = Array5::<f64>::zeros((a_u, a_v, h, w, c));
    let mut up_curv = Array5::<f64>::zeros(if with_curv {
        (a_u, a_v, h, w, c)
    } else {
        (0, 0, 0, 0, 0)
    });
    let rec = match target {
        SolveTarget::Supervised(reference) => {
            if rendered.data().dim() != reference.data().dim() {
                let a = rendered.data().dim();
                let b = reference.data().dim();
                return Err(SolveError::ExtentMismatch {
                    what: "reference light field",
                    expected: vec![a.0, a.1, a.2, a.3, a.4],
                    got: vec![b.0, b.1, b.2, b.3, b.4],
                });
            }
            let n = rendered.data().len() as f64;
            let mut sum = 0.0;
            {
                let ug = up_grad.as_slice_mut().expect("contiguous upstream");
                let uh = up_curv.as_slice_mut().expect("contiguous upstream");
                let ra = rendered.data().as_slice().expect("contiguous rendered");
                let rb = reference.data().as_slice().expect("contiguous reference");
                for i in 0..ra.len() {
                    let r = ra[i] - rb[i];
                    sum += charbonnier(r, eps);
                    ug[i] = charbonnier_deriv(r, eps) / n;
                    if with_curv {
                        uh[i] = irls_weight(r, eps) / n;
                    }
                }
            }
            sum / n
        }
        SolveTarget::Measurement { models, observed } => {
            check_measurements(center, dfield, models, observed)?;
            let mut total = 0.0;
            for (model, obs) in models.iter().zip(observed.iter()) {
                let sim = lf_sensing::simulate(&rendered, model)?;
                let n = sim.data.len() as f64;
                // d(term)/d(sim) and the IRLS weight per measurement pixel.
                let mut dsim = vec![0.0; h * w * c];
                let mut wsim = vec![0.0; h * w * c];
                let mut sum = 0.0;
                let sa = sim.data.as_slice().expect("contiguous sim");
                let ob = obs.data.as_slice().expect("contiguous observed");
                for i in 0..sa.len() {
                    let r = sa[i] - ob[i];
                    sum += charbonnier(r, eps);
                    dsim[i] = charbonnier_deriv(r, eps) / n;
                    wsim[i] = irls_weight(r, eps) / n;
                }
                total += sum / n;
                // d(sim)/d(rendered view v) is the (normalized) weight map.
                let wsum = if model.normalize {
                    Some(model.weight_sum())
                } else {
                    None
                };
                let ug = up_grad.as_slice_mut().expect("contiguous upstream");
                let uh = up_curv.as_slice_mut().expect("contiguous upstream");
                let sums = wsum.as_ref().map(|s| s.as_slice().expect("contiguous sums"));
                for iu in 0..a_u {
                    for iv in 0..a_v {
                        let wmap = model.weights.index_axis(ndarray::Axis(0), iu);
                        let wmap = wmap.index_axis_move(ndarray::Axis(0), iv);
                        let wmap = wmap.as_slice().expect("contiguous weights");
                        let base = (iu * a_v + iv) * h * w * c;
                        for p in 0..h * w {
                            let mut wgt = wmap[p];
                            if let Some(s) = sums {
                                wgt /= s[p];
                            }
                            if wgt == 0.0 {
                                continue;
                            }
                            for ch in 0..c {
                                ug[base + p * c + ch] += wgt * dsim[p * c + ch];
                                if with_curv {
                                    uh[base + p * c + ch] += wgt * wgt * wsim[p * c + ch];
                                }
                            }
                        }
                    }
                }
            }
            total
        }
    };
    let (mut grad, mut curv) = if with_curv {
        let (g, h) = lf_warp::render_lf_grad_curv(center, dfield, &up_grad, &up_curv)?;
        (g, Some(h))
    } else {
        (render_lf_grad(center, dfield, &up_grad)?, None)
    };

    // Regularizers, each with normalization folded into the weight.
    let mut dc_grad = WarpGradient::zeros_like(dfield);
    let mut dc_curv = with_curv.then(|| WarpGradient::zeros_like(dfield));
    let (dc_sum, dc_count) =
        dc_term_sum(dfield, &UNIT_OFFSETS, eps, Some(&mut dc_grad), dc_curv.as_mut());
    let dc = if dc_count == 0 { 0.0 } else { dc_sum / dc_count as f64 };

    let mut tv_grad = WarpGradient::zeros_like(dfield);
    let mut tv_curv = with_curv.then(|| WarpGradient::zeros_like(dfield));
    let (tv_sum, tv_count) = tv_term_sum(dfield, eps, Some(&mut tv_grad), tv_curv.as_mut());
    let tv = if tv_count == 0 { 0.0 } else { tv_sum / tv_count as f64 };

    let dc_scale = if dc_count == 0 {
        0.0
    } else {
        config.lambda_dc / dc_count as f64
    };
    let tv_scale = if tv_count == 0 {
        0.0
    } else {
        config.lambda_tv / tv_count as f64
    };
    ndarray::Zip::from(&mut grad.values)
        .and(&dc_grad.values)
        .and(&tv_grad.values)
        .for_each(|g, &gd, &gt| {
            *g += dc_scale * gd + tv_scale * gt;
        });
    if let Some(hc) = curv.as_mut() {
        let dc_h = dc_curv.expect("curvature accumulators exist");
        let tv_h = tv_curv.expect("curvature accumulators exist");
        ndarray::Zip::from(&mut hc.values)
            .and(&dc_h.values)
            .and(&tv_h.values)
            .for_each(|h, &hd, &ht| {
                *h += dc_scale * hd + tv_scale * ht;
            });
    }

    Ok((
        LossBreakdown {
            rec,
            dc,
            tv,
            total: rec + config.lambda_dc * dc + config.lambda_tv * tv,
        },
        grad,
        curv,
    ))
}

fn check_mode(config: &SolverConfig, target: &SolveTarget<'_>) -> Result<()> {
    if config.mode != target.mode() {
        return Err(SolveError::ModeMismatch {
            config: config.mode.as_str(),
            given: target.mode().as_str(),
        });
    }
    Ok(())
}

/// A separate 3-channel-aware gradient-magnitude helper used by textured-
/// pixel masks: central differences on the channel mean.
pub fn gradient_magnitude(image: &Image) -> Array2<f64> {
    let (h, w, c) = image.dim();
    let lum = Array2::from_shape_fn((h, w), |(y, x)| {
        (0..c).map(|ch| image[[y, x, ch]]).sum::<f64>() / c as f64
    });
    Array2::from_shape_fn((h, w), |(y, x)| {
        let xm = lum[[y, x.saturating_sub(1)]];
        let xp = lum[[y, (x + 1).min(w - 1)]];
        let ym = lum[[y.saturating_sub(1), x]];
        let yp = lum[[(y + 1).min(h - 1), x]];
        let gx = (xp - xm) / 2.0;
        let gy = (yp - ym) / 2.0;
        (gx * gx + gy * gy).sqrt()
    })
}
