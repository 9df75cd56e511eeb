//! equichern-core: exact verification of the two Chern-character
//! constructions over crossed products of torus actions.
//!
//! Everything is computed in exact arithmetic (cyclotomic rationals with a
//! formal 2*pi*i), so all identity checks are equality tests with zero
//! tolerance.  Desk-scale scenarios: T^2 with finite cyclic groups or the
//! circle acting by affine maps / translations.

pub mod scalar;
pub mod torus;
pub mod group;
pub mod matform;
pub mod bundle;
pub mod dga;
pub mod cochain;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("non-invertible matrix: {0}")]
    NonInvertible(String),
    #[error("unsupported scenario: {0}")]
    Unsupported(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}
