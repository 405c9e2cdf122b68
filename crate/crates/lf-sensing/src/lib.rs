//! Coded light-field capture: code generation and forward simulation.
//!
//! All generators are deterministic functions of `(seed, parameters)` and
//! all simulation is pure; see [`rng`] for the exact random-stream contract.

mod error;
mod gen;
mod model;
pub mod rng;
mod scheme;
mod simulate;

pub use error::{Result, SensingError};
pub use gen::{
    gen_aperture_model, gen_clf_model, gen_defocus_model, gen_pinhole_model, regenerate,
    CLF_CODE_MEAN, CLF_CODE_STD,
};
pub use model::{CodeProvenance, CodedImage, CodedModel, Provenance, SchemeKind};
pub use scheme::{CaptureScheme, CodeParams, SchemeRegistry};
pub use simulate::{capture_focus_defocus, capture_pinhole, simulate};
