//! Exact sparse measures on countable carriers.

mod element;
mod measure;
mod scalar;

pub use element::ElementId;
pub use measure::{PointFunction, SparseMeasure};
pub use scalar::{rational_to_f64, Scalar, DEFAULT_TOLERANCE, FLOAT_ZERO};
