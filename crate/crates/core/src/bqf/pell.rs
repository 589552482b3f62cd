use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::kernel_value;
use crate::arith::Discriminant;
use crate::error::{domain, inconsistent, Result};

/// Fundamental unit (x + y*sqrt(d))/2 of the order of discriminant d.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PellUnit {
    pub discriminant: Discriminant,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub x: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub y: BigInt,
    pub norm_sign: i8,
}

fn check_real(d: &Discriminant) -> Result<i64> {
    let v = kernel_value(d)?;
    if v <= 0 || d.is_square() {
        return Err(domain(format!("{v} is not a positive non-square discriminant")));
    }
    Ok(v)
}

// Continued fraction of (b0 + sqrt d)/2: the (P, Q) pairs of one full period
// of the purely periodic tail.
fn period(d: i64) -> Vec<(i64, i64)> {
    let s = d.sqrt();
    let (mut p, mut q) = (d & 1, 2i64);
    let step = |p: i64, q: i64| {
        let a = (p + s).div_euclid(q);
        let np = a * q - p;
        (np, (d - np * np) / q)
    };
    (p, q) = step(p, q);
    let first = (p, q);
    let mut out = vec![first];
    loop {
        (p, q) = step(p, q);
        if (p, q) == first {
            return out;
        }
        out.push((p, q));
    }
}

/// Sign of the norm of the fundamental unit, from the period parity alone.
pub fn pell_norm_sign(d: &Discriminant) -> Result<i8> {
    let v = check_real(d)?;
    Ok(if period(v).len() % 2 == 1 { -1 } else { 1 })
}

/// Minimal solution of x^2 - d y^2 = +-4 from the continued fraction period.
pub fn pell_unit(d: &Discriminant) -> Result<PellUnit> {
    let v = check_real(d)?;
    let per = period(v);
    let dv = BigInt::from(v);
    // running product (X + Y sqrt d)/Z
    let (mut x, mut y, mut z) = (BigInt::one(), BigInt::zero(), BigInt::one());
    for &(p, q) in &per {
        let p = BigInt::from(p);
        let nx = &x * &p + &y * &dv;
        let ny = &x + &y * &p;
        z *= q;
        x = nx;
        y = ny;
        let g = x.gcd(&y).gcd(&z);
        if !g.is_one() {
            x /= &g;
            y /= &g;
            z /= &g;
        }
    }
    let two = BigInt::from(2);
    let (xx, rx) = (&x * &two).div_rem(&z);
    let (yy, ry) = (&y * &two).div_rem(&z);
    if !rx.is_zero() || !ry.is_zero() {
        return Err(inconsistent(format!("unit for {v} is not half-integral")));
    }
    let sign: i8 = if per.len() % 2 == 1 { -1 } else { 1 };
    let lhs = &xx * &xx - &dv * &yy * &yy;
    if lhs != BigInt::from(4 * sign as i64) || xx.is_negative() || !yy.is_positive() {
        return Err(inconsistent(format!("pell relation fails for {v}")));
    }
    Ok(PellUnit {
        discriminant: d.clone(),
        x: xx,
        y: yy,
        norm_sign: sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // exhaustive search over y = 1, 2, ...
    fn brute(d: i64) -> (i64, i64, i8) {
        for y in 1i64.. {
            for (t, s) in [(-4i64, -1i8), (4, 1)] {
                let x2 = d * y * y + t;
                if x2 >= 0 {
                    let x = (x2 as f64).sqrt().round() as i64;
                    for xc in [x - 1, x, x + 1] {
                        if xc >= 0 && xc * xc == x2 {
                            return (xc, y, s);
                        }
                    }
                }
            }
        }
        unreachable!()
    }

    fn unit(d: i64) -> (i64, i64, i8) {
        let u = pell_unit(&Discriminant::new(d).unwrap()).unwrap();
        (u.x.try_into().unwrap(), u.y.try_into().unwrap(), u.norm_sign)
    }

    #[test]
    fn frozen_values() {
        assert_eq!(unit(8), (2, 1, -1));
        assert_eq!(unit(24), (10, 2, 1));
        assert_eq!(unit(5), (1, 1, -1));
    }

    #[test]
    fn exhaustive_oracle() {
        for d in 5..400i64 {
            if d % 4 > 1 {
                continue;
            }
            let r = (d as f64).sqrt() as i64;
            if r * r == d || (r + 1) * (r + 1) == d {
                continue;
            }
            assert_eq!(unit(d), brute(d), "d={d}");
        }
    }

    #[test]
    fn rejects_squares() {
        assert!(pell_unit(&Discriminant::new(4).unwrap()).is_err());
        assert!(pell_unit(&Discriminant::new(-4).unwrap()).is_err());
    }
}
