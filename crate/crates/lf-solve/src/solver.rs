//! Coarse-to-fine first-order minimization of the composite objective.
//!
//! Each pyramid level runs gradient descent with per-coordinate moment
//! scaling and a backtracking line search, projecting onto the disparity
//! clamp after every trial step; accepted losses are therefore
//! non-increasing within a level. At the coarsest level the solver can start
//! from both a small positive and a small negative constant field and keep
//! the branch with the lower loss, which resolves the focal-plane sign
//! ambiguity when the data supports it.

use ndarray::Array4;

use lf_core::{Image, LightField};
use lf_sensing::{CodedImage, CodedModel};
use lf_warp::DisparityField;

use crate::config::SolverConfig;
use crate::error::{Result, SolveError};
use crate::loss::{evaluate_full, total_loss, LossBreakdown, SolveTarget};
use crate::pyramid::{
    downscale_coded_image, downscale_image, downscale_light_field, downscale_model,
    effective_levels, upsample_disparity,
};

const MOMENTUM_BETA: f64 = 0.9;
/// Relative Levenberg floor on the curvature scale.
const CURV_DAMPING: f64 = 1e-3;
/// Constant-field magnitude for the coarsest-level sign branches.
const COARSE_INIT_DISPARITY: f64 = 0.25;
/// Maximum step halvings before the line search reports a stall.
const MAX_BACKTRACKS: usize = 24;
/// Per-coordinate trust radius in pixels: the Gauss-Newton step is only
/// meaningful within the bilinear interpolant's linearization range.
const TRUST_RADIUS: f64 = 1.0;
/// Largest line-search multiplier.
const MAX_STEP: f64 = 1.0;
/// Relative improvement below which a level is considered converged.
const CONVERGENCE_RTOL: f64 = 1e-12;

/// Diagnostics of one solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveReport {
    pub report_version: u32,
    /// Accepted-loss traces per pyramid level, coarsest first; each trace
    /// starts with the initial loss and is non-increasing.
    pub level_traces: Vec<Vec<f64>>,
    /// Loss decomposition at the returned field, on the finest level.
    pub final_losses: LossBreakdown,
    /// Total accepted iterations across levels.
    pub iterations: usize,
    /// Sign branch kept at the coarsest level, when multi-start ran.
    pub chosen_sign: Option<i8>,
    pub pyramid_levels_used: usize,
    /// Not serialized: wall-clock timing would make otherwise deterministic
    /// report files differ between identical runs.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

/// Owned per-level copy of the solve references.
enum LevelTarget {
    Supervised(LightField),
    Measurement(Vec<CodedModel>, Vec<CodedImage>),
}

impl LevelTarget {
    fn as_target(&self) -> SolveTarget<'_> {
        match self {
            LevelTarget::Supervised(reference) => SolveTarget::Supervised(reference),
            LevelTarget::Measurement(models, observed) => SolveTarget::Measurement {
                models,
                observed,
            },
        }
    }

    fn downscale(&self) -> Result<LevelTarget> {
        Ok(match self {
            LevelTarget::Supervised(reference) => {
                LevelTarget::Supervised(downscale_light_field(reference)?)
            }
            LevelTarget::Measurement(models, observed) => LevelTarget::Measurement(
                models.iter().map(downscale_model).collect(),
                observed.iter().map(downscale_coded_image).collect(),
            ),
        })
    }
}

/// Estimate the disparity field for `center` against the given references.
///
/// Deterministic for fixed inputs and configuration; the returned field is
/// clamped to `[-d_max, d_max]`.
pub fn solve_disparity(
    center: &Image,
    target: &SolveTarget<'_>,
    config: &SolverConfig,
) -> Result<(DisparityField, SolveReport)> {
    config.validate()?;
    if config.mode != target.mode() {
        return Err(SolveError::ModeMismatch {
            config: config.mode.as_str(),
            given: target.mode().as_str(),
        });
    }
    let start = std::time::Instant::now();
    let (h, w, _c) = center.dim();
    let (a_u, a_v) = target.angular_extents()?;

    // Build the pyramid, finest level first.
    let levels = effective_levels(config.pyramid_levels, h, w);
    let mut centers = vec![center.clone()];
    let mut targets = vec![match target {
        SolveTarget::Supervised(reference) => LevelTarget::Supervised((*reference).clone()),
        SolveTarget::Measurement { models, observed } => {
            LevelTarget::Measurement(models.to_vec(), observed.to_vec())
        }
    }];
    for l in 1..levels {
        centers.push(downscale_image(&centers[l - 1]));
        targets.push(targets[l - 1].downscale()?);
    }

    // Validate extents once at the finest level by evaluating the loss; this
    // also gives the initial objective a defined starting point.
    let zero = DisparityField::with_limit(Array4::zeros((a_u, a_v, h, w)), config.d_max)?;
    total_loss(center, &zero, config, target)?;

    let mut traces: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut iterations = 0usize;
    let mut chosen_sign = None;
    let mut field: Option<DisparityField> = None;

    for level in (0..levels).rev() {
        let lc = &centers[level];
        let lt = targets[level].as_target();
        let (lh, lw, _) = lc.dim();
        let init = match field.take() {
            Some(coarse) => upsample_disparity(&coarse, lh, lw, config.d_max)?,
            None => {
                if config.multi_start_signs {
                    // Run both sign branches through the coarsest level, then
                    // rank them by the finest-level loss of their upsampled
                    // fields: the coarse pooled objective carries a model-
                    // error floor that can drown out small-disparity sign
                    // differences. Ties resolve to the positive branch.
                    let pos = constant_field(a_u, a_v, lh, lw, COARSE_INIT_DISPARITY, config)?;
                    let neg = constant_field(a_u, a_v, lh, lw, -COARSE_INIT_DISPARITY, config)?;
                    let run_pos = optimize_level(lc, &lt, config, pos, level)?;
                    let run_neg = optimize_level(lc, &lt, config, neg, level)?;
                    let (fh, fw, _) = centers[0].dim();
                    let fine_target = targets[0].as_target();
                    let pos_fine = upsample_disparity(&run_pos.field, fh, fw, config.d_max)?;
                    let neg_fine = upsample_disparity(&run_neg.field, fh, fw, config.d_max)?;
                    let pos_loss =
                        total_loss(&centers[0], &pos_fine, config, &fine_target)?.total;
                    let neg_loss =
                        total_loss(&centers[0], &neg_fine, config, &fine_target)?.total;
                    let keep_neg = neg_loss < pos_loss;
                    chosen_sign = Some(if keep_neg { -1 } else { 1 });
                    let kept = if keep_neg { run_neg } else { run_pos };
                    if std::env::var("LF_SOLVE_DEBUG").is_ok() {
                        let v = kept.field.values();
                        let mean = v.iter().sum::<f64>() / v.len() as f64;
                        eprintln!(
                            "[debug] coarsest {level}: mean {mean:.3} min {:.3} max {:.3} (pos {pos_loss:.4e} neg {neg_loss:.4e})",
                            v.iter().cloned().fold(f64::INFINITY, f64::min),
                            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                        );
                    }
                    traces.push(kept.trace);
                    iterations += kept.accepted;
                    field = Some(kept.field);
                    continue;
                }
                constant_field(a_u, a_v, lh, lw, 0.0, config)?
            }
        };
        let run = optimize_level(lc, &lt, config, init, level)?;
        if std::env::var("LF_SOLVE_DEBUG").is_ok() {
            let v = run.field.values();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            eprintln!(
                "[debug] level {level}: field mean {mean:.3} min {:.3} max {:.3}",
                v.iter().cloned().fold(f64::INFINITY, f64::min),
                v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            );
        }
        traces.push(run.trace);
        iterations += run.accepted;
        field = Some(run.field);
    }

    let field = field.expect("at least one pyramid level runs");
    let final_losses = total_loss(center, &field, config, target)?;
    let report = SolveReport {
        report_version: 1,
        level_traces: traces,
        final_losses,
        iterations,
        chosen_sign,
        pyramid_levels_used: levels,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((field, report))
}

fn constant_field(
    a_u: usize,
    a_v: usize,
    h: usize,
    w: usize,
    value: f64,
    config: &SolverConfig,
) -> Result<DisparityField> {
    Ok(DisparityField::with_limit(
        Array4::from_elem((a_u, a_v, h, w), value.clamp(-config.d_max, config.d_max)),
        config.d_max,
    )?)
}

struct LevelRun {
    field: DisparityField,
    trace: Vec<f64>,
    accepted: usize,
}

fn optimize_level(
    center: &Image,
    target: &SolveTarget<'_>,
    config: &SolverConfig,
    init: DisparityField,
    level: usize,
) -> Result<LevelRun> {
    let dim = init.values().dim();
    let mut field = init;
    let mut momentum = Array4::<f64>::zeros(dim);

    let mut current = total_loss(center, &field, config, target)?.total;
    if !current.is_finite() {
        return Err(SolveError::Diverged {
            level,
            iteration: 0,
        });
    }
    let mut trace = vec![current];
    let mut accepted = 0usize;
    // The line search warm-starts from twice the last accepted step, so
    // consistently successful iterations take growing strides while failed
    // trials still back off geometrically.
    let mut alpha_start = config.step_size;
    // Momentum misaligns with the gradient where residuals oscillate around
    // the Charbonnier kink; when progress dies the momentum is reset, and
    // only a stall on the fresh direction (a positive diagonal scaling of
    // the steepest descent) ends the level.
    let mut steps_since_reset = 0i32;

    for iter in 0..config.iters_per_level {
        let (_, grad, curv) = evaluate_full(center, &field, config, target, true)?;
        let curv = curv.expect("curvature requested");
        if grad.values.iter().any(|g| !g.is_finite()) {
            return Err(SolveError::Diverged {
                level,
                iteration: iter,
            });
        }

        steps_since_reset += 1;
        let t = steps_since_reset;
        ndarray::Zip::from(&mut momentum)
            .and(&grad.values)
            .for_each(|m, &g| *m = MOMENTUM_BETA * *m + (1.0 - MOMENTUM_BETA) * g);
        let bias1 = 1.0 - MOMENTUM_BETA.powi(t);
        // Damped Gauss-Newton scaling: coordinates near their optimum have
        // large curvature (the Charbonnier sharpens as residuals shrink) and
        // automatically take small absolute steps, so they cannot veto the
        // shared line-search step of coordinates still far from theirs.
        let mean_curv =
            curv.values.iter().sum::<f64>() / curv.values.len().max(1) as f64;
        let damping = 1e-12 + CURV_DAMPING * mean_curv;
        let direction = ndarray::Zip::from(&momentum)
            .and(&curv.values)
            .map_collect(|&m, &h| {
                (-(m / bias1) / (h + damping)).clamp(-TRUST_RADIUS, TRUST_RADIUS)
            });

        // Backtracking line search with projection onto the disparity clamp.
        let mut alpha = alpha_start;
        let mut step = None;
        for _ in 0..=MAX_BACKTRACKS {
            let values = ndarray::Zip::from(field.values())
                .and(&direction)
                .map_collect(|&d, &p| (d + alpha * p).clamp(-config.d_max, config.d_max));
            let candidate = DisparityField::with_limit(values, config.d_max)?;
            let loss = total_loss(center, &candidate, config, target)?.total;
            if !loss.is_finite() {
                return Err(SolveError::Diverged {
                    level,
                    iteration: iter,
                });
            }
            if loss <= current {
                step = Some((candidate, loss));
                break;
            }
            alpha *= 0.5;
        }

        // This iteration's direction is "fresh" when it was built right
        // after a moment reset, i.e. it is a positive diagonal scaling of
        // the steepest-descent direction.
        let was_fresh = steps_since_reset == 1;
        let negligible = match step {
            Some((candidate, loss)) => {
                let improvement = current - loss;
                field = candidate;
                current = loss;
                trace.push(loss);
                accepted += 1;
                alpha_start = (alpha * 2.0).min(MAX_STEP);
                improvement <= CONVERGENCE_RTOL * current.abs().max(1e-9)
            }
            None => true,
        };
        if negligible {
            if was_fresh {
                // Even the fresh direction made no real progress: the level
                // has converged to working precision.
                break;
            }
            momentum.fill(0.0);
            steps_since_reset = 0;
            alpha_start = config.step_size;
        }
    }

    Ok(LevelRun {
        field,
        trace,
        accepted,
    })
}
