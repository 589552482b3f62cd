//! The totally real base field: Q or a real quadratic field Q(sqrt m).

mod elem;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

pub use elem::{parse_elem, FieldElem};

use crate::arith::{factorize, is_squarefree_u64, kronecker_i64, sqrt_mod_prime, Discriminant};
use crate::bqf::{class_number_real, pell_unit, PellUnit};
use crate::error::{domain, inconsistent, Error, Result};

/// Generator search slack beyond the norm-derived window.
pub const SEARCH_SLACK: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Rational,
    RealQuadratic(u64),
}

/// Totally real base field with its cached invariants.
#[derive(Debug, Clone, Serialize)]
pub struct BaseField {
    pub kind: FieldKind,
    pub disc: u64,
    pub degree: usize,
    pub h: u64,
    pub h_plus: u64,
    pub fundamental_unit: Option<PellUnit>,
    pub sigma_space_dim: usize,
    /// Set when h > 1: principality-dependent operations refuse.
    pub restricted_support: bool,
    #[serde(skip)]
    unit: Option<FieldElem>,
}

/// A prime ideal of the ring of integers, with a generator (class number one).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPrime {
    pub p: u64,
    /// residue degree
    pub degree: u32,
    pub generator: FieldElem,
    /// root of the minimal polynomial of w modulo p when degree = 1
    pub root: Option<u64>,
}

/// An integral ideal of the base field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldIdeal {
    pub m: u64,
    pub norm: BigUint,
    pub generator: Option<FieldElem>,
    pub totally_positive_generator: Option<FieldElem>,
}

impl BaseField {
    pub fn rational() -> Self {
        BaseField {
            kind: FieldKind::Rational,
            disc: 1,
            degree: 1,
            h: 1,
            h_plus: 1,
            fundamental_unit: None,
            sigma_space_dim: 1,
            restricted_support: false,
            unit: None,
        }
    }

    /// Build the field and populate every cached invariant.
    pub fn new(kind: FieldKind) -> Result<Self> {
        let m = match kind {
            FieldKind::Rational => return Ok(Self::rational()),
            FieldKind::RealQuadratic(m) => m,
        };
        if m < 2 || !is_squarefree_u64(m) {
            return Err(domain(format!("m = {m} must be squarefree and > 1")));
        }
        let disc = if m % 4 == 1 { m } else { 4 * m };
        let d = Discriminant::new(disc as i64)?;
        let hs = class_number_real(&d)?;
        let pu = pell_unit(&d)?;
        // (x + y sqrt disc)/2 rewritten over sqrt m
        let unit = if disc == m {
            FieldElem::from_parts(m, pu.x.clone(), pu.y.clone(), 2)
        } else {
            FieldElem::from_parts(m, pu.x.clone(), pu.y.clone() * 2, 2)
        };
        let sigma_space_dim = if pu.norm_sign == -1 { 2 } else { 1 };
        let h_plus = hs.h_wide << (2 - sigma_space_dim);
        if h_plus != hs.h_narrow {
            return Err(inconsistent(format!(
                "narrow class number {} disagrees with h * 2^(n - dim sigma) = {h_plus}",
                hs.h_narrow
            )));
        }
        Ok(BaseField {
            kind,
            disc,
            degree: 2,
            h: hs.h_wide,
            h_plus,
            fundamental_unit: Some(pu),
            sigma_space_dim,
            restricted_support: hs.h_wide > 1,
            unit: Some(unit),
        })
    }

    /// Q(sqrt m), or Q for m = 1.
    pub fn quadratic(m: u64) -> Result<Self> {
        if m == 1 {
            Ok(Self::rational())
        } else {
            Self::new(FieldKind::RealQuadratic(m))
        }
    }

    /// Radicand (1 for Q).
    pub fn m(&self) -> u64 {
        match self.kind {
            FieldKind::Rational => 1,
            FieldKind::RealQuadratic(m) => m,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.kind == FieldKind::Rational
    }

    pub fn name(&self) -> String {
        match self.kind {
            FieldKind::Rational => "Q".into(),
            FieldKind::RealQuadratic(m) => format!("Q(sqrt{m})"),
        }
    }

    pub fn elem(&self, n: i64) -> FieldElem {
        FieldElem::from_int(self.m(), n)
    }

    /// Fundamental unit, normalized to exceed 1 at the first place.
    pub fn unit(&self) -> Option<&FieldElem> {
        self.unit.as_ref()
    }

    pub fn unit_norm(&self) -> i8 {
        self.fundamental_unit.as_ref().map_or(-1, |u| u.norm_sign)
    }

    /// w^2 = s w + r for the integral basis {1, w}.
    pub fn omega_relation(&self) -> (i64, i64) {
        let m = self.m() as i64;
        match self.kind {
            FieldKind::Rational => (0, 0),
            _ if m % 4 == 1 => (1, (m - 1) / 4),
            _ => (0, m),
        }
    }

    pub fn require_class_number_one(&self) -> Result<()> {
        if self.restricted_support {
            Err(Error::Unsupported(format!(
                "{} has class number {}; principality tests need h = 1",
                self.name(),
                self.h
            )))
        } else {
            Ok(())
        }
    }

    /// Representatives of R_F^* / R_F^*2.
    pub fn units_mod_squares(&self) -> Vec<FieldElem> {
        let m = self.m();
        let mut out = vec![FieldElem::one(m), FieldElem::from_int(m, -1)];
        if let Some(e) = &self.unit {
            out.push(e.clone());
            out.push(-e);
        }
        out
    }

    /// Representatives of totally positive units modulo squares.
    pub fn tp_units_mod_squares(&self) -> Vec<FieldElem> {
        let m = self.m();
        let mut out = vec![FieldElem::one(m)];
        if let Some(e) = &self.unit {
            if self.unit_norm() == 1 {
                out.push(if e.is_totally_positive() { e.clone() } else { -e });
            }
        }
        out
    }

    /// Generator of the different ideal.
    pub fn different_generator(&self) -> FieldElem {
        let m = self.m();
        match self.kind {
            FieldKind::Rational => FieldElem::one(1),
            _ if m % 4 == 1 => FieldElem::sqrt_m(m),
            _ => FieldElem::from_ints(m, 0, 2),
        }
    }

    /// Prime ideals above a rational prime, each with a generator.
    pub fn primes_over(&self, p: u64) -> Result<Vec<FieldPrime>> {
        let m = self.m();
        if self.is_rational() {
            return Ok(vec![FieldPrime { p, degree: 1, generator: FieldElem::from_int(1, p), root: Some(0) }]);
        }
        self.require_class_number_one()?;
        let k = kronecker_i64(self.disc as i64, p as i64);
        if k == -1 {
            return Ok(vec![FieldPrime { p, degree: 2, generator: FieldElem::from_int(m, p), root: None }]);
        }
        let (s, r) = self.omega_relation();
        let roots: Vec<u64> = if p < 64 {
            (0..p)
                .filter(|&w| {
                    let w = w as i64;
                    (w * w - s * w - r).rem_euclid(p as i64) == 0
                })
                .collect()
        } else {
            // w^2 - s w - r = 0 mod p, p odd
            let pi = p as i128;
            let disc = ((s * s + 4 * r) as i128).rem_euclid(pi) as u64;
            let t = sqrt_mod_prime(disc, p).ok_or_else(|| inconsistent("missing root for a split prime"))?;
            let inv2 = (pi + 1) / 2;
            let mut v: Vec<u64> = [t as i128, pi - t as i128]
                .iter()
                .map(|&z| (((s as i128 + z) * inv2).rem_euclid(pi)) as u64)
                .collect();
            v.sort();
            v.dedup();
            v
        };
        roots
            .into_iter()
            .map(|w| {
                let g = self.prime_generator(p, w)?;
                Ok(FieldPrime { p, degree: 1, generator: g, root: Some(w) })
            })
            .collect()
    }

    // Element a + b w of norm +-p lying in (p, w - root).
    fn prime_generator(&self, p: u64, root: u64) -> Result<FieldElem> {
        let (s, r) = self.omega_relation();
        let m = self.m();
        let (s, r, pi) = (s as i128, r as i128, p as i128);
        let bound = ((p as f64).sqrt() as i128 + SEARCH_SLACK as i128) * 64;
        for b in 0..=bound {
            for sign in [1i128, -1] {
                // a^2 + s b a - (r b^2 + sign p) = 0
                let disc = s * s * b * b + 4 * (r * b * b + sign * pi);
                if disc < 0 {
                    continue;
                }
                let t = disc.sqrt();
                if t * t != disc {
                    continue;
                }
                for a2 in [-s * b + t, -s * b - t] {
                    if a2 % 2 != 0 {
                        continue;
                    }
                    let a = a2 / 2;
                    for bb in [b, -b] {
                        let aa = if bb == b { a } else { -a };
                        if (aa + bb * root as i128).rem_euclid(pi) == 0 {
                            return Ok(FieldElem::from_coords(m, &BigInt::from(aa), &BigInt::from(bb)));
                        }
                    }
                }
            }
        }
        Err(Error::SearchExhausted(format!("no generator found for a prime above {p}")))
    }

    /// Exponent of a prime in a nonzero integral element.
    pub fn valuation(&self, prime: &FieldPrime, x: &FieldElem) -> Result<u32> {
        if x.is_zero() {
            return Err(domain("valuation of zero"));
        }
        let mut v = 0;
        let mut cur = x.clone();
        loop {
            let q = cur.div(&prime.generator)?;
            if !q.is_integral() {
                return Ok(v);
            }
            cur = q;
            v += 1;
        }
    }

    /// Prime ideal factorization of the principal ideal (x).
    pub fn factor_element(&self, x: &FieldElem) -> Result<Vec<(FieldPrime, u32)>> {
        if !x.is_integral() || x.is_zero() {
            return Err(domain(format!("{x} is not a nonzero integral element")));
        }
        let n = x.norm().to_integer();
        let mut out = Vec::new();
        for (p, _) in factorize(&n)?.factors {
            let p = p.to_u64().ok_or_else(|| Error::DeskScaleExceeded("prime above 2^64".into()))?;
            for q in self.primes_over(p)? {
                let v = self.valuation(&q, x)?;
                if v > 0 {
                    out.push((q, v));
                }
            }
        }
        Ok(out)
    }

    /// Sign vector of an element over the real places.
    pub fn signs(&self, x: &FieldElem) -> Vec<i8> {
        (0..self.degree).map(|p| x.sign_at(p)).collect()
    }

    /// Unit multiple of g that is totally positive, if any.
    pub fn totally_positive_associate(&self, g: &FieldElem) -> Option<FieldElem> {
        self.units_mod_squares()
            .into_iter()
            .map(|u| &u * g)
            .find(|c| c.is_totally_positive())
    }

    /// Totally positive generator of an ideal; Ok(None) when the ideal is
    /// principal but has no totally positive generator.
    pub fn totally_positive_generator(&self, ideal: &FieldIdeal) -> Result<Option<FieldElem>> {
        self.require_class_number_one()?;
        let g = match &ideal.generator {
            Some(g) => g.clone(),
            None => self.search_generator(&ideal.norm)?,
        };
        Ok(self.totally_positive_associate(&g))
    }

    // Some integral element of the given absolute norm.
    fn search_generator(&self, norm: &BigUint) -> Result<FieldElem> {
        let m = self.m();
        let n = BigInt::from(norm.clone());
        if self.is_rational() {
            return Ok(FieldElem::from_int(1, n));
        }
        let nf = norm.to_f64().unwrap_or(f64::INFINITY);
        let ybound = (nf / m as f64).sqrt().ceil() as u64 + SEARCH_SLACK;
        // y runs over half-integers when m = 1 mod 4
        let den: u64 = if m % 4 == 1 { 2 } else { 1 };
        for k in 0..=(ybound * den) {
            let kb = BigInt::from(k);
            for sign in [1i64, -1] {
                // (den x)^2 = m k^2 + sign den^2 n
                let rhs = BigInt::from(m) * &kb * &kb + BigInt::from(sign * (den * den) as i64) * &n;
                if rhs.is_negative() {
                    continue;
                }
                let t = rhs.sqrt();
                if &t * &t == rhs {
                    let e = FieldElem::from_parts(m, t, kb.clone(), den);
                    if e.is_integral() {
                        return Ok(e);
                    }
                }
            }
        }
        Err(Error::SearchExhausted(format!(
            "no element of norm {norm} with |y| <= {ybound}"
        )))
    }
}

/// Parse "Q" or "Q(sqrtM)" (also "Q(sqrt(M))", "Q(√M)").
pub fn parse_field(spec: &str) -> Result<BaseField> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if s.eq_ignore_ascii_case("q") {
        return Ok(BaseField::rational());
    }
    let inner = s
        .strip_prefix("Q(")
        .or_else(|| s.strip_prefix("q("))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| bad_field(spec))?;
    let radicand = inner
        .strip_prefix("sqrt")
        .or_else(|| inner.strip_prefix('√'))
        .ok_or_else(|| bad_field(spec))?;
    let radicand = radicand.trim_start_matches('(').trim_end_matches(')');
    let m: u64 = radicand.parse().map_err(|_| bad_field(spec))?;
    BaseField::quadratic(m)
}

fn bad_field(spec: &str) -> Error {
    Error::Domain(format!("field spec {spec:?} is not Q or Q(sqrtM)"))
}

impl FieldIdeal {
    pub fn principal(field: &BaseField, g: FieldElem) -> Self {
        let norm = g.norm().to_integer().magnitude().clone();
        let tp = field.totally_positive_associate(&g);
        FieldIdeal {
            m: field.m(),
            norm,
            generator: Some(g),
            totally_positive_generator: tp,
        }
    }

    pub fn unit(field: &BaseField) -> Self {
        Self::principal(field, field.elem(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Signed;

    #[test]
    fn field_specs() {
        assert!(parse_field("Q").unwrap().is_rational());
        for s in ["Q(sqrt2)", "Q(sqrt(2))", "Q(√2)", " q( sqrt 2 ) "] {
            assert_eq!(parse_field(s).unwrap().m(), 2, "{s}");
        }
        for s in ["Q(sqrt4)", "R", "Q(sqrt-2)", "Q(2)"] {
            assert!(matches!(parse_field(s), Err(Error::Domain(_))), "{s}");
        }
    }

    #[test]
    fn fields() {
        let q = BaseField::rational();
        assert_eq!((q.disc, q.h, q.h_plus, q.sigma_space_dim), (1, 1, 1, 1));
        let f2 = BaseField::quadratic(2).unwrap();
        assert_eq!((f2.disc, f2.h, f2.h_plus), (8, 1, 1));
        assert_eq!(f2.unit().unwrap(), &FieldElem::from_ints(2, 1, 1));
        assert_eq!(f2.unit_norm(), -1);
        let f3 = BaseField::quadratic(3).unwrap();
        assert_eq!((f3.disc, f3.h, f3.h_plus), (12, 1, 2));
        assert_eq!(f3.unit().unwrap(), &FieldElem::from_ints(3, 2, 1));
        let f5 = BaseField::quadratic(5).unwrap();
        assert_eq!(f5.unit().unwrap(), &FieldElem::from_parts(5, 1, 1, 2));
        let f10 = BaseField::quadratic(10).unwrap();
        assert!(f10.restricted_support);
        assert!(BaseField::quadratic(12).is_err());
    }

    #[test]
    fn unit_representatives() {
        let f3 = BaseField::quadratic(3).unwrap();
        assert_eq!(f3.tp_units_mod_squares(), vec![f3.elem(1), FieldElem::from_ints(3, 2, 1)]);
        let f2 = BaseField::quadratic(2).unwrap();
        assert_eq!(f2.tp_units_mod_squares().len(), 1);
        assert_eq!(f2.units_mod_squares().len(), 4);
        assert_eq!(BaseField::rational().units_mod_squares().len(), 2);
    }

    #[test]
    fn tp_generators() {
        let q = BaseField::rational();
        let i = FieldIdeal { m: 1, norm: BigUint::from(6u32), generator: None, totally_positive_generator: None };
        assert_eq!(q.totally_positive_generator(&i).unwrap(), Some(q.elem(6)));
        let f2 = BaseField::quadratic(2).unwrap();
        let i7 = FieldIdeal::principal(&f2, f2.elem(-7));
        assert_eq!(f2.totally_positive_generator(&i7).unwrap(), Some(f2.elem(7)));
        // sqrt3 has signs (+,-); units of Q(sqrt3) only reach (+,+), (-,-)
        let f3 = BaseField::quadratic(3).unwrap();
        let r3 = FieldIdeal::principal(&f3, FieldElem::sqrt_m(3));
        assert_eq!(f3.totally_positive_generator(&r3).unwrap(), None);
        let f10 = BaseField::quadratic(10).unwrap();
        assert!(f10.totally_positive_generator(&FieldIdeal::unit(&f10)).is_err());
    }

    #[test]
    fn primes_of_q_sqrt2() {
        let f2 = BaseField::quadratic(2).unwrap();
        let over7 = f2.primes_over(7).unwrap();
        assert_eq!(over7.len(), 2);
        for q in &over7 {
            assert_eq!(q.generator.norm().abs(), BigRational::from_integer(7.into()));
        }
        let fac = f2.factor_element(&f2.elem(7)).unwrap();
        assert_eq!(fac.iter().map(|(_, e)| e).sum::<u32>(), 2);
        let two = f2.factor_element(&f2.elem(2)).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].1, 2);
        assert_eq!(f2.primes_over(3).unwrap()[0].degree, 2);
        let f5 = BaseField::quadratic(5).unwrap();
        assert_eq!(f5.primes_over(11).unwrap().len(), 2);
        assert_eq!(f5.primes_over(2).unwrap()[0].degree, 2);
        assert_eq!(f5.factor_element(&FieldElem::sqrt_m(5)).unwrap()[0].1, 1);
    }
}
