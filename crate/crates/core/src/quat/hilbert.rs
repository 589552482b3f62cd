//! Local Hilbert symbols over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::kronecker;
use crate::error::{domain, Result};

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum QPlace {
    Prime(u64),
    Infinity,
}

// Integer in the same square class as q.
fn square_class_integer(q: &BigRational) -> BigInt {
    q.numer() * q.denom()
}

fn split_power(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut k = 0;
    let mut u = n.clone();
    while (&u % p).is_zero() {
        u /= p;
        k += 1;
    }
    (k, u)
}

fn mod8(u: &BigInt) -> u8 {
    u.mod_floor(&BigInt::from(8)).to_u8().unwrap()
}

/// (a, b)_v for nonzero rationals a, b.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: QPlace) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(domain("Hilbert symbol needs nonzero arguments"));
    }
    let a = square_class_integer(a);
    let b = square_class_integer(b);
    let p = match place {
        QPlace::Infinity => return Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        QPlace::Prime(p) => p,
    };
    let pb = BigInt::from(p);
    let (alpha, u) = split_power(&a, &pb);
    let (beta, v) = split_power(&b, &pb);
    if p == 2 {
        let eps = |x: &BigInt| u32::from((mod8(x) % 4) == 3);
        let omega = |x: &BigInt| u32::from(matches!(mod8(x), 3 | 5));
        let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
        return Ok(if e % 2 == 0 { 1 } else { -1 });
    }
    let mut s: i8 = if (alpha * beta) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
    if beta % 2 == 1 {
        s *= kronecker(&u, &pb);
    }
    if alpha % 2 == 1 {
        s *= kronecker(&v, &pb);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn small_values() {
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), QPlace::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), QPlace::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(&r(-1), &r(3), QPlace::Prime(3)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&r(1), &r(7), QPlace::Prime(7)).unwrap(), 1);
        // 1/2 and 2 share a square class
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            hilbert_symbol(&half, &r(3), QPlace::Prime(3)).unwrap(),
            hilbert_symbol(&r(2), &r(3), QPlace::Prime(3)).unwrap()
        );
    }
}
