//! Class numbers of quadratic orders over the rationals through binary quadratic forms.

mod analytic;
mod definite;
mod indefinite;
mod pell;

use serde::Serialize;

pub use analytic::analytic_h;
pub use definite::{class_number_imag, reduced_forms_imag};
pub use indefinite::{class_number_real, narrow_class_number, RealClassNumbers};
pub use pell::{pell_norm_sign, pell_unit, PellUnit};

use crate::arith::Discriminant;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    DefiniteEnumeration,
    IndefiniteCycles,
    AnalyticOracle,
}

/// A class number together with the route that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedFormCount {
    pub discriminant: Discriminant,
    pub h: u64,
    pub method: CountMethod,
}

/// Largest |discriminant| the machine-word kernels accept.
pub const KERNEL_LIMIT: i64 = 1 << 52;

pub(crate) fn kernel_value(d: &Discriminant) -> Result<i64> {
    match d.as_i64() {
        Some(v) if v.abs() <= KERNEL_LIMIT => Ok(v),
        _ => Err(Error::DeskScaleExceeded(format!(
            "|{}| is above the enumeration limit 2^52",
            d.value
        ))),
    }
}

pub(crate) fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    use num_integer::Integer;
    a.gcd(&b).gcd(&c)
}
