//! Capture schemes as interchangeable strategies.
//!
//! A [`CaptureScheme`] describes one way of multiplexing a light field into
//! measurements: which coded models to build and whether the scheme also
//! captures the all-in-focus centerview. Schemes register by name in a
//! [`SchemeRegistry`] and are selected at runtime (the CLI's `--scheme`
//! flag resolves against it), so new capture variants can be added without
//! touching the pipeline code.

use std::collections::BTreeMap;

use crate::error::{Result, SensingError};
use crate::gen::{gen_aperture_model, gen_clf_model, gen_defocus_model};
use crate::model::CodedModel;

/// Generator knobs shared across schemes; schemes ignore fields they do not
/// use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeParams {
    pub seed: u64,
    /// Spatial period of the heterodyne code tile.
    pub tile: usize,
    /// Mask displacement in pixels per unit angular offset.
    pub shift_per_view: i64,
    pub normalize: bool,
}

impl Default for CodeParams {
    fn default() -> Self {
        CodeParams {
            seed: 0,
            tile: 15,
            shift_per_view: 1,
            normalize: true,
        }
    }
}

/// One capture strategy: builds the coded models whose simulated images are
/// the scheme's measurements.
pub trait CaptureScheme: Send + Sync {
    /// Registry key, also the CLI-facing name.
    fn name(&self) -> &'static str;

    /// Build the measurement models for the given extents.
    fn build_models(
        &self,
        a_u: usize,
        a_v: usize,
        height: usize,
        width: usize,
        params: &CodeParams,
    ) -> Result<Vec<CodedModel>>;

    /// Whether the scheme also captures the all-in-focus centerview as a
    /// separate narrow-aperture exposure.
    fn captures_all_in_focus(&self) -> bool {
        false
    }
}

struct ClfScheme;

impl CaptureScheme for ClfScheme {
    fn name(&self) -> &'static str {
        "clf"
    }

    fn build_models(
        &self,
        a_u: usize,
        a_v: usize,
        height: usize,
        width: usize,
        p: &CodeParams,
    ) -> Result<Vec<CodedModel>> {
        Ok(vec![gen_clf_model(
            a_u,
            a_v,
            height,
            width,
            p.tile,
            p.seed,
            p.shift_per_view,
            p.normalize,
        )?])
    }
}

struct CodedApertureScheme;

impl CaptureScheme for CodedApertureScheme {
    fn name(&self) -> &'static str {
        "ca"
    }

    fn build_models(
        &self,
        a_u: usize,
        a_v: usize,
        height: usize,
        width: usize,
        p: &CodeParams,
    ) -> Result<Vec<CodedModel>> {
        Ok(vec![gen_aperture_model(
            a_u,
            a_v,
            height,
            width,
            p.seed,
            p.normalize,
        )?])
    }
}

struct FocusDefocusScheme;

impl CaptureScheme for FocusDefocusScheme {
    fn name(&self) -> &'static str {
        "focdef"
    }

    fn build_models(
        &self,
        a_u: usize,
        a_v: usize,
        height: usize,
        width: usize,
        _p: &CodeParams,
    ) -> Result<Vec<CodedModel>> {
        Ok(vec![gen_defocus_model(a_u, a_v, height, width)?])
    }

    fn captures_all_in_focus(&self) -> bool {
        true
    }
}

struct DefocusOnlyScheme;

impl CaptureScheme for DefocusOnlyScheme {
    fn name(&self) -> &'static str {
        "defocus-only"
    }

    fn build_models(
        &self,
        a_u: usize,
        a_v: usize,
        height: usize,
        width: usize,
        _p: &CodeParams,
    ) -> Result<Vec<CodedModel>> {
        Ok(vec![gen_defocus_model(a_u, a_v, height, width)?])
    }
}

/// Name-keyed registry of capture schemes.
pub struct SchemeRegistry {
    schemes: BTreeMap<&'static str, Box<dyn CaptureScheme>>,
}

impl SchemeRegistry {
    /// Registry with the built-in schemes: `clf`, `ca`, `focdef` and
    /// `defocus-only`.
    pub fn with_builtins() -> Self {
        let mut reg = SchemeRegistry {
            schemes: BTreeMap::new(),
        };
        reg.register(Box::new(ClfScheme));
        reg.register(Box::new(CodedApertureScheme));
        reg.register(Box::new(FocusDefocusScheme));
        reg.register(Box::new(DefocusOnlyScheme));
        reg
    }

    pub fn register(&mut self, scheme: Box<dyn CaptureScheme>) {
        self.schemes.insert(scheme.name(), scheme);
    }

    pub fn get(&self, name: &str) -> Result<&dyn CaptureScheme> {
        self.schemes
            .get(name)
            .map(|s| s.as_ref())
            .ok_or_else(|| SensingError::UnknownScheme(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemes.keys().copied().collect()
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        SchemeRegistry::with_builtins()
    }
}
