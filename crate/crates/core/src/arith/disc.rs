use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::factorize;
use crate::error::{domain, Result};

/// Discriminant of a quadratic ring over the integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Discriminant {
    #[serde(serialize_with = "crate::ser::bigint")]
    pub value: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub fundamental_part: BigInt,
    #[serde(serialize_with = "crate::ser::biguint")]
    pub conductor: BigUint,
}

impl Discriminant {
    pub fn new(v: impl Into<BigInt>) -> Result<Self> {
        decompose_discriminant(&v.into())
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    pub fn is_fundamental(&self) -> bool {
        self.conductor.is_one()
    }

    pub fn is_square(&self) -> bool {
        !self.value.is_negative() && {
            let r = self.value.sqrt();
            &r * &r == self.value
        }
    }

    /// Value as i64 when it fits.
    pub fn as_i64(&self) -> Option<i64> {
        self.value.to_i64()
    }
}

/// Split v = fundamental_part * conductor^2 with a fundamental first factor.
pub fn decompose_discriminant(v: &BigInt) -> Result<Discriminant> {
    if v.is_zero() {
        return Err(domain("discriminant must be nonzero"));
    }
    let r = v.mod_floor(&BigInt::from(4)).to_u8().unwrap();
    if r == 2 || r == 3 {
        return Err(domain(format!("{v} is not 0 or 1 mod 4")));
    }
    let f = factorize(v)?;
    let mut kernel = BigInt::one();
    let mut sq = BigUint::one();
    for (p, e) in &f.factors {
        if e % 2 == 1 {
            kernel *= BigInt::from(p.clone());
        }
        sq *= p.pow(e / 2);
    }
    if v.is_negative() {
        kernel = -kernel;
    }
    let (fund, cond) = if kernel.mod_floor(&BigInt::from(4)).is_one() {
        (kernel, sq)
    } else {
        // kernel = 2,3 mod 4 forces an even square part
        (kernel * 4, sq / 2u32)
    };
    Ok(Discriminant {
        value: v.clone(),
        fundamental_part: fund,
        conductor: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Square-divisor oracle: largest f with v/f^2 a discriminant whose own
    // square divisors give nothing further.
    fn oracle(v: i64) -> (i64, i64) {
        let mut best = (v, 1);
        for f in 1..=((v.abs() as f64).sqrt() as i64 + 1) {
            if v % (f * f) == 0 {
                let d = v / (f * f);
                if d.rem_euclid(4) <= 1 {
                    best = (d, f);
                }
            }
        }
        best
    }

    #[test]
    fn frozen_values() {
        let d = decompose_discriminant(&BigInt::from(-60)).unwrap();
        assert_eq!((d.fundamental_part, d.conductor), (BigInt::from(-15), BigUint::from(2u32)));
        let d = decompose_discriminant(&BigInt::from(-24)).unwrap();
        assert_eq!((d.fundamental_part, d.conductor), (BigInt::from(-24), BigUint::one()));
        // squares reduce to the trivial discriminant 1
        let d = decompose_discriminant(&BigInt::from(4)).unwrap();
        assert_eq!((d.fundamental_part, d.conductor), (BigInt::one(), BigUint::from(2u32)));
        assert!(decompose_discriminant(&BigInt::from(-5)).is_err());
        assert!(decompose_discriminant(&BigInt::from(6)).is_err());
    }

    #[test]
    fn square_divisor_oracle() {
        for v in -3000i64..3000 {
            if v == 0 || v.rem_euclid(4) > 1 {
                continue;
            }
            let d = decompose_discriminant(&BigInt::from(v)).unwrap();
            let (f0, c) = oracle(v);
            assert_eq!(d.fundamental_part, BigInt::from(f0), "v={v}");
            assert_eq!(d.conductor, BigUint::from(c as u64));
        }
    }
}
