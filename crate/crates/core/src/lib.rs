//! Principal polarizations on abelian varieties with quaternionic multiplication.
//!
//! Counts are evaluated from class numbers of quadratic and quartic CM orders,
//! all computed from first principles: binary quadratic forms over the
//! rationals, relation search and unit lattices for the quartic fields.

pub mod arith;
pub mod bqf;
pub mod error;
mod ser;

pub use error::{Error, Result};
pub mod field;
pub mod numfield;
pub mod cm;
pub mod quat;
pub mod polar;
