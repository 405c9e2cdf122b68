//! Core light-field container and slicing primitives.
//!
//! All types here are immutable after construction and every operation is a
//! pure function, so they are safe to use from any number of threads.

mod epi;
mod error;
pub mod interp;
mod light_field;

pub use epi::{extract_epi, Epi, EpiAxis};
pub use error::{CoreError, Result};
pub use light_field::{AngularOffset, Image, LightField};

/// Construct a light field from raw `(u, v, y, x, c)` data that is already
/// known to satisfy the container invariants. Intended for operations (warps,
/// shears) whose outputs are convex combinations of valid inputs.
pub fn light_field_from_valid_parts(data: ndarray::Array5<f64>) -> LightField {
    LightField::from_parts_unchecked(data)
}
