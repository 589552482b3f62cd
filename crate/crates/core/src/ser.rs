//! Serde helpers: big integers are written as decimal strings.

use num_bigint::{BigInt, BigUint};
use serde::Serializer;

pub(crate) fn bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn biguint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
