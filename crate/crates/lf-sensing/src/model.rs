//! Coded capture models and measurements.

use ndarray::Array4;
use serde::{Deserialize, Serialize};

use lf_core::Image;

use crate::error::{Result, SensingError};
use crate::rng::GENERATOR_VERSION;

/// Which forward model a weight set realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Heterodyne mask near the sensor: spatially varying per-view weights.
    Clf,
    /// Code on the aperture plane: one weight per view.
    CodedAperture,
    /// Uniform angular averaging (wide-aperture capture).
    Defocus,
    /// Center view only (narrow-aperture capture).
    Pinhole,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Clf => "clf",
            SchemeKind::CodedAperture => "coded_aperture",
            SchemeKind::Defocus => "defocus",
            SchemeKind::Pinhole => "pinhole",
        }
    }
}

/// Generator inputs recorded so a model can be rebuilt from its description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeProvenance {
    pub scheme: SchemeKind,
    pub a_u: usize,
    pub a_v: usize,
    pub height: usize,
    pub width: usize,
    pub seed: Option<u64>,
    pub tile: Option<usize>,
    pub shift_per_view: Option<i64>,
    pub normalize: bool,
    pub generator_version: String,
}

impl CodeProvenance {
    pub(crate) fn new(
        scheme: SchemeKind,
        extents: (usize, usize, usize, usize),
        seed: Option<u64>,
        tile: Option<usize>,
        shift_per_view: Option<i64>,
        normalize: bool,
    ) -> Self {
        CodeProvenance {
            scheme,
            a_u: extents.0,
            a_v: extents.1,
            height: extents.2,
            width: extents.3,
            seed,
            tile,
            shift_per_view,
            normalize,
            generator_version: GENERATOR_VERSION.to_string(),
        }
    }
}

/// Per-view spatial weight maps `f(x, v)` unifying the capture schemes.
///
/// Weights are stored `(u, v, y, x)` and rounded to f32 precision at
/// creation so the serialized f32 payload round-trips bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedModel {
    pub weights: Array4<f64>,
    pub normalize: bool,
    pub provenance: CodeProvenance,
}

impl CodedModel {
    pub(crate) fn new(weights: Array4<f64>, normalize: bool, provenance: CodeProvenance) -> Self {
        debug_assert!(weights.iter().all(|w| (0.0..=1.0).contains(w)));
        CodedModel {
            weights,
            normalize,
            provenance,
        }
    }

    pub fn scheme(&self) -> SchemeKind {
        self.provenance.scheme
    }

    /// `(A_u, A_v, H, W)`.
    pub fn extents(&self) -> (usize, usize, usize, usize) {
        self.weights.dim()
    }

    /// Per-pixel sum of weights over all views, the normalization divisor.
    pub fn weight_sum(&self) -> ndarray::Array2<f64> {
        self.weights.sum_axis(ndarray::Axis(0)).sum_axis(ndarray::Axis(0))
    }

    /// Validate the weight sum is positive everywhere before a normalized
    /// simulation.
    pub fn check_weight_sum(&self) -> Result<()> {
        if !self.normalize {
            return Ok(());
        }
        let sums = self.weight_sum();
        for ((y, x), &s) in sums.indexed_iter() {
            if s <= 0.0 {
                return Err(SensingError::ZeroWeightSum { y, x });
            }
        }
        Ok(())
    }
}

/// How a measurement's provenance was established when it was (re)loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Provenance {
    Known(CodeProvenance),
    /// The measurement was loaded without a sidecar; treat with care.
    Unknown,
}

impl Provenance {
    pub fn is_known(&self) -> bool {
        matches!(self, Provenance::Known(_))
    }
}

/// A 2D coded measurement `I_c(x)` with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedImage {
    pub data: Image,
    pub normalized: bool,
    pub provenance: Provenance,
}
