use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Element x + y*sqrt(m) of Q(sqrt m); m = 1 encodes the rational field (y = 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub m: u64,
    pub x: BigRational,
    pub y: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldElem {
    pub fn new(m: u64, x: BigRational, y: BigRational) -> Self {
        if m == 1 {
            return FieldElem { m, x: x + y, y: BigRational::zero() };
        }
        FieldElem { m, x, y }
    }

    pub fn from_int(m: u64, n: impl Into<BigInt>) -> Self {
        FieldElem::new(m, BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ints(m: u64, x: i64, y: i64) -> Self {
        FieldElem::new(m, rat(x), rat(y))
    }

    /// (x + y sqrt m) / den with integer inputs.
    pub fn from_parts(m: u64, x: impl Into<BigInt>, y: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        FieldElem::new(
            m,
            BigRational::new(x.into(), den.clone()),
            BigRational::new(y.into(), den),
        )
    }

    pub fn zero(m: u64) -> Self {
        FieldElem::from_int(m, 0)
    }

    pub fn one(m: u64) -> Self {
        FieldElem::from_int(m, 1)
    }

    pub fn sqrt_m(m: u64) -> Self {
        FieldElem::new(m, BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Norm down to Q (the element itself over Q).
    pub fn norm(&self) -> BigRational {
        if self.m == 1 {
            return self.x.clone();
        }
        &self.x * &self.x - &self.y * &self.y * rat(self.m as i64)
    }

    pub fn trace(&self) -> BigRational {
        if self.m == 1 {
            return self.x.clone();
        }
        &self.x * rat(2)
    }

    pub fn conj(&self) -> Self {
        FieldElem::new(self.m, self.x.clone(), -self.y.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(domain("inverse of zero"));
        }
        if self.m == 1 {
            return Ok(FieldElem::new(1, self.x.recip(), BigRational::zero()));
        }
        let n = self.norm();
        let c = self.conj();
        Ok(FieldElem::new(self.m, c.x / &n, c.y / n))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElem::new(self.m, &self.x * q, &self.y * q)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = FieldElem::one(self.m);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Algebraic integer test (trace and norm integral).
    pub fn is_integral(&self) -> bool {
        self.trace().is_integer() && self.norm().is_integer()
    }

    /// Exact sign under the real place `place` (0: sqrt m > 0, 1: sqrt m < 0).
    pub fn sign_at(&self, place: usize) -> i8 {
        let sy = if place == 0 { self.y.clone() } else { -self.y.clone() };
        let sx = sign(&self.x);
        let syy = sign(&sy);
        if syy == 0 || self.m == 1 {
            return sx;
        }
        if sx == 0 || sx == syy {
            return syy;
        }
        let x2 = &self.x * &self.x;
        let y2m = &sy * &sy * rat(self.m as i64);
        if x2 > y2m {
            sx
        } else {
            syy
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        let places = if self.m == 1 { 1 } else { 2 };
        (0..places).all(|p| self.sign_at(p) > 0)
    }

    pub fn to_f64_at(&self, place: usize) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        let r = (self.m as f64).sqrt();
        if place == 0 {
            x + y * r
        } else {
            x - y * r
        }
    }

    /// Coordinates (a, b) in the ring-of-integers basis {1, w} when integral.
    pub fn integral_coords(&self) -> Option<(BigInt, BigInt)> {
        if !self.is_integral() {
            return None;
        }
        if self.m % 4 == 1 && self.m != 1 {
            // x + y sqrt m = (x - y) + 2y w with w = (1 + sqrt m)/2
            let b = &self.y * rat(2);
            let a = &self.x - &self.y;
            Some((a.to_integer(), b.to_integer()))
        } else {
            Some((self.x.to_integer(), self.y.to_integer()))
        }
    }

    /// Inverse of `integral_coords`.
    pub fn from_coords(m: u64, a: &BigInt, b: &BigInt) -> Self {
        if m % 4 == 1 && m != 1 {
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let yb = BigRational::from_integer(b.clone()) * &half;
            FieldElem::new(m, BigRational::from_integer(a.clone()) + &yb, yb)
        } else {
            FieldElem::new(m, BigRational::from_integer(a.clone()), BigRational::from_integer(b.clone()))
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        (self.y.is_zero() && self.x.is_integer()).then(|| self.x.to_integer())
    }

    pub fn denominator_lcm(&self) -> BigInt {
        self.x.denom().lcm(self.y.denom())
    }
}

fn sign(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        assert_eq!(self.m, o.m, "mixed fields");
        FieldElem::new(self.m, &self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        assert_eq!(self.m, o.m, "mixed fields");
        FieldElem::new(self.m, &self.x - &o.x, &self.y - &o.y)
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        assert_eq!(self.m, o.m, "mixed fields");
        let m = rat(self.m as i64);
        FieldElem::new(
            self.m,
            &self.x * &o.x + &self.y * &o.y * m,
            &self.x * &o.y + &self.y * &o.x,
        )
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(self.m, -self.x.clone(), -self.y.clone())
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: FieldElem) -> FieldElem {
        &self + &o
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: FieldElem) -> FieldElem {
        &self - &o
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: FieldElem) -> FieldElem {
        &self * &o
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let den = self.denominator_lcm();
        let xn = (&self.x * BigRational::from_integer(den.clone())).to_integer();
        let yn = (&self.y * BigRational::from_integer(den.clone())).to_integer();
        let mut s = String::new();
        if !xn.is_zero() {
            s.push_str(&xn.to_string());
        }
        let ya = yn.abs();
        if yn.is_negative() {
            s.push('-');
        } else if !xn.is_zero() {
            s.push('+');
        }
        if !ya.is_one() {
            s.push_str(&format!("{ya}*"));
        }
        s.push_str(&format!("sqrt{}", self.m));
        if den.is_one() {
            write!(f, "{s}")
        } else if xn.is_zero() {
            write!(f, "{s}/{den}")
        } else {
            write!(f, "({s})/{den}")
        }
    }
}

/// Parse "7", "-3", "3+2*sqrt2", "sqrt(5)", "(1+sqrt5)/2", "1/6" over Q(sqrt m).
pub fn parse_elem(m: u64, s: &str) -> Result<FieldElem> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(domain("empty field element"));
    }
    let (body, den) = match t.rfind('/') {
        Some(i) => {
            let d: BigInt = t[i + 1..]
                .parse()
                .map_err(|_| domain(format!("bad denominator in {s:?}")))?;
            if d.is_zero() {
                return Err(domain("zero denominator"));
            }
            (&t[..i], d)
        }
        None => (&t[..], BigInt::one()),
    };
    let body = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .unwrap_or(body);
    let mut x = BigInt::zero();
    let mut y = BigInt::zero();
    let mut rest = body;
    while !rest.is_empty() {
        let neg = rest.starts_with('-');
        if rest.starts_with('+') || rest.starts_with('-') {
            rest = &rest[1..];
        }
        let end = rest[1.min(rest.len())..]
            .find(['+', '-'])
            .map(|i| i + 1)
            .unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        let (coef, is_sqrt) = match term.find("sqrt") {
            Some(i) => {
                let c = term[..i].trim_end_matches('*');
                let rad = term[i + 4..].trim_start_matches('(').trim_end_matches(')');
                let r: u64 = rad.parse().map_err(|_| domain(format!("bad radical in {s:?}")))?;
                if r != m {
                    return Err(domain(format!("element uses sqrt{r} but the field is Q(sqrt{m})")));
                }
                let c: BigInt = if c.is_empty() {
                    BigInt::one()
                } else {
                    c.parse().map_err(|_| domain(format!("bad coefficient in {s:?}")))?
                };
                (c, true)
            }
            None => (
                term.parse::<BigInt>().map_err(|_| domain(format!("bad integer {term:?} in {s:?}")))?,
                false,
            ),
        };
        let coef = if neg { -coef } else { coef };
        if is_sqrt {
            y += coef;
        } else {
            x += coef;
        }
    }
    if m == 1 && !y.is_zero() {
        return Err(domain("square root in an element of Q"));
    }
    Ok(FieldElem::from_parts(m, x, y, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = FieldElem::from_ints(2, 1, 1);
        let b = a.conj();
        assert_eq!(&a * &b, FieldElem::from_int(2, -1));
        assert_eq!(a.norm(), rat(-1));
        assert_eq!(a.sign_at(0), 1);
        assert_eq!(a.sign_at(1), -1);
        let c = FieldElem::from_ints(3, 2, 1);
        assert!(c.is_totally_positive());
        assert_eq!(c.inv().unwrap(), FieldElem::from_ints(3, 2, -1));
    }

    #[test]
    fn parsing_round_trip() {
        for (m, s) in [(2, "3+2*sqrt2"), (5, "(1+sqrt5)/2"), (1, "7"), (2, "-sqrt2"), (1, "1/6"), (3, "3+2*sqrt3")] {
            let e = parse_elem(m, s).unwrap();
            assert_eq!(e.to_string(), s);
        }
        assert_eq!(parse_elem(2, "sqrt(2)").unwrap(), FieldElem::sqrt_m(2));
        assert!(parse_elem(2, "sqrt3").is_err());
        assert!(parse_elem(1, "x").is_err());
    }

    #[test]
    fn coords() {
        let w = FieldElem::from_parts(5, 1, 1, 2);
        assert_eq!(w.integral_coords(), Some((BigInt::zero(), BigInt::one())));
        assert_eq!(FieldElem::from_coords(5, &BigInt::zero(), &BigInt::one()), w);
        assert!(FieldElem::from_parts(3, 1, 1, 2).integral_coords().is_none());
    }
}
