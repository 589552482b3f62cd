//! Quaternion algebras (a, b / F): ramification over Q, pure quaternions,
//! orientation at real places, the index of a line bundle and the degree of
//! the attached isogeny.
//!
//! Split embedding at a real place sigma with sigma(a) > 0:
//! i -> diag(sqrt a, -sqrt a), j -> [[0, 1], [b, 0]]. When sigma(a) < 0 the
//! chart is taken on (b, a) with i' = j, j' = i.

mod hilbert;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use hilbert::{hilbert_symbol, QPlace};

use crate::arith::factorize;
use crate::error::{domain, inconsistent, Error, Result};
use crate::field::{BaseField, FieldElem, FieldIdeal};

/// B = (a, b / F): i^2 = a, j^2 = b, ji = -ij.
#[derive(Debug, Clone)]
pub struct QuaternionAlgebra {
    pub base: BaseField,
    pub a: FieldElem,
    pub b: FieldElem,
    /// finite ramified primes (over Q only)
    pub ramified_finite: Vec<u64>,
    pub disc_ideal: FieldIdeal,
    pub totally_indefinite: bool,
    pub division: bool,
}

fn check_nonzero(a: &FieldElem, b: &FieldElem) -> Result<()> {
    if a.is_zero() || b.is_zero() {
        return Err(domain("quaternion algebra needs nonzero a, b"));
    }
    Ok(())
}

fn splits_at(a: &FieldElem, b: &FieldElem, place: usize) -> bool {
    a.sign_at(place) > 0 || b.sign_at(place) > 0
}

/// Ramification of (a, b / Q) from Hilbert symbols.
pub fn discriminant_of(a: &BigInt, b: &BigInt) -> Result<QuaternionAlgebra> {
    if a.is_zero() || b.is_zero() {
        return Err(domain("quaternion algebra needs nonzero a, b"));
    }
    let ar = BigRational::from_integer(a.clone());
    let br = BigRational::from_integer(b.clone());
    let mut primes: Vec<u64> = vec![2];
    for n in [a, b] {
        for p in factorize(n)?.primes() {
            let p = u64::try_from(p).map_err(|_| Error::Unsupported("prime factor beyond 64 bits".into()))?;
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();
    let mut ramified_finite = Vec::new();
    for p in primes {
        if hilbert_symbol(&ar, &br, QPlace::Prime(p))? == -1 {
            ramified_finite.push(p);
        }
    }
    let at_infinity = hilbert_symbol(&ar, &br, QPlace::Infinity)?;
    let ramified = ramified_finite.len() + usize::from(at_infinity == -1);
    if ramified % 2 != 0 {
        return Err(inconsistent(format!("odd number {ramified} of ramified places for ({a}, {b})")));
    }
    let disc: BigUint = ramified_finite.iter().map(|&p| BigUint::from(p)).product();
    let base = BaseField::rational();
    let disc_ideal = FieldIdeal::principal(&base, FieldElem::from_int(1, BigInt::from(disc)));
    Ok(QuaternionAlgebra {
        base,
        a: FieldElem::from_int(1, a.clone()),
        b: FieldElem::from_int(1, b.clone()),
        division: ramified > 0,
        ramified_finite,
        disc_ideal,
        totally_indefinite: at_infinity == 1,
    })
}

impl QuaternionAlgebra {
    /// An algebra over a real quadratic field with its discriminant supplied.
    pub fn with_discriminant(base: &BaseField, a: FieldElem, b: FieldElem, disc_ideal: FieldIdeal) -> Result<Self> {
        check_nonzero(&a, &b)?;
        if base.is_rational() {
            let (Some(ai), Some(bi)) = (a.as_integer(), b.as_integer()) else {
                return Err(domain("over Q give integral a, b"));
            };
            return discriminant_of(&ai, &bi);
        }
        let totally_indefinite = (0..base.degree).all(|s| splits_at(&a, &b, s));
        Ok(QuaternionAlgebra {
            base: base.clone(),
            division: !disc_ideal.norm.is_one() || !totally_indefinite,
            a,
            b,
            ramified_finite: Vec::new(),
            disc_ideal,
            totally_indefinite,
        })
    }

    pub fn degree(&self) -> usize {
        self.base.degree
    }

    /// Reduced norm of x + y i + z j + w ij.
    pub fn reduced_norm(&self, c: [&FieldElem; 4]) -> FieldElem {
        let ab = &self.a * &self.b;
        let t = &(c[0] * c[0]) - &(&self.a * &(c[1] * c[1]));
        &(&t - &(&self.b * &(c[2] * c[2]))) + &(&ab * &(c[3] * c[3]))
    }

    /// Reduced trace of x + y i + z j + w ij.
    pub fn reduced_trace(&self, c: [&FieldElem; 4]) -> FieldElem {
        c[0] + c[0]
    }
}

/// mu = x i + y j + z ij with mu^2 + delta = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PureQuaternion {
    pub x: FieldElem,
    pub y: FieldElem,
    pub z: FieldElem,
    pub delta: FieldElem,
}

impl PureQuaternion {
    pub fn new(alg: &QuaternionAlgebra, x: FieldElem, y: FieldElem, z: FieldElem) -> Result<Self> {
        // mu^2 = a x^2 + b y^2 - a b z^2
        let sq = &(&(&alg.a * &(&x * &x)) + &(&alg.b * &(&y * &y))) - &(&(&alg.a * &alg.b) * &(&z * &z));
        let delta = -sq;
        let zero = FieldElem::zero(alg.base.m());
        let nrd = alg.reduced_norm([&zero, &x, &y, &z]);
        if nrd != delta {
            return Err(inconsistent("mu^2 + delta = 0 fails against the reduced norm"));
        }
        Ok(PureQuaternion { x, y, z, delta })
    }

    pub fn neg(&self) -> Self {
        PureQuaternion { x: -&self.x, y: -&self.y, z: -&self.z, delta: self.delta.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    /// Real 2x2 image at a place in the chart described in the module docs.
    pub fn matrix_at(&self, alg: &QuaternionAlgebra, place: usize) -> Result<[[f64; 2]; 2]> {
        let (a, b, x, y, z) = chart(alg, self, place)?;
        let ev = |e: &FieldElem| e.to_f64_at(place);
        let ra = ev(&a).sqrt();
        Ok([
            [ev(&x) * ra, ev(&y) + ev(&z) * ra],
            [ev(&b) * (ev(&y) - ev(&z) * ra), -ev(&x) * ra],
        ])
    }
}

// (a, b, x, y, z) in a chart with sigma(a) > 0.
fn chart(alg: &QuaternionAlgebra, mu: &PureQuaternion, place: usize) -> Result<(FieldElem, FieldElem, FieldElem, FieldElem, FieldElem)> {
    if place >= alg.degree() {
        return Err(domain(format!("no real place {place}")));
    }
    if alg.a.sign_at(place) > 0 {
        Ok((alg.a.clone(), alg.b.clone(), mu.x.clone(), mu.y.clone(), mu.z.clone()))
    } else if alg.b.sign_at(place) > 0 {
        // i' = j, j' = i, i'j' = -ij
        Ok((alg.b.clone(), alg.a.clone(), mu.y.clone(), mu.x.clone(), -&mu.z))
    } else {
        Err(domain(format!("algebra ramifies at real place {place}")))
    }
}

/// Sign per real place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignatureVector(pub Vec<i8>);

/// Orientation of mu at one real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Orientation {
    /// sign of det(nu); None when sigma(delta) < 0, where conjugators of
    /// both determinant signs exist
    pub det_sign: Option<i8>,
    pub delta_sign: i8,
}

// Exact sign of Y - Z sqrt(A) at a place, A > 0 there.
fn sign_minus_root(y: &FieldElem, z: &FieldElem, a: &FieldElem, place: usize) -> i8 {
    let s1 = y.sign_at(place);
    let s2 = -z.sign_at(place);
    if s2 == 0 || s1 == s2 {
        return if s1 == 0 { s2 } else { s1 };
    }
    if s1 == 0 {
        return s2;
    }
    let diff = &(y * y) - &(&(z * z) * a);
    match diff.sign_at(place) {
        1 => s1,
        -1 => s2,
        _ => 0,
    }
}

/// Sign of det(nu) with nu mu^sigma nu^-1 = omega_sigma.
pub fn orientation(alg: &QuaternionAlgebra, mu: &PureQuaternion, place: usize) -> Result<Orientation> {
    if mu.is_zero() {
        return Err(domain("mu must be nonzero"));
    }
    let (a, b, _x, y, z) = chart(alg, mu, place)?;
    let delta_sign = mu.delta.sign_at(place);
    if delta_sign < 0 {
        return Ok(Orientation { det_sign: None, delta_sign });
    }
    if delta_sign == 0 {
        return Err(domain("mu^2 = 0 at this place"));
    }
    // omega = [[0, r], [-r, 0]] with r > 0; conjugation by GL2+ keeps the sign
    // of the lower-left entry, which for mu^sigma is b (y - z sqrt a)
    let lower_left = b.sign_at(place) * sign_minus_root(&y, &z, &a, place);
    if lower_left == 0 {
        return Err(inconsistent("elliptic mu^sigma with vanishing lower-left entry"));
    }
    Ok(Orientation { det_sign: Some(-lower_left), delta_sign })
}

/// Local archimedean index from the signs of delta, det(nu) and Im(tau).
pub fn local_index(delta_sign: i8, det_sign: i8, tau_sign: i8) -> u32 {
    if delta_sign < 0 {
        1
    } else if det_sign * tau_sign > 0 {
        0
    } else {
        2
    }
}

/// Index of the line bundle with first Chern class mu.
pub fn global_index(alg: &QuaternionAlgebra, mu: &PureQuaternion, tau: &SignatureVector) -> Result<u32> {
    if !alg.totally_indefinite {
        return Err(domain("algebra is not totally indefinite"));
    }
    if tau.0.len() != alg.degree() {
        return Err(domain(format!("signature vector needs {} entries", alg.degree())));
    }
    let mut total = 0;
    for (place, &t) in tau.0.iter().enumerate() {
        let o = orientation(alg, mu, place)?;
        total += local_index(o.delta_sign, o.det_sign.unwrap_or(0), t);
    }
    Ok(total)
}

/// deg(phi) = N(theta^2 n(I)^2 D delta)^2 where `theta_n` generates
/// n(I) times the different and `disc` generates D_O.
pub fn degree_of_phi(theta_n: &FieldElem, disc: &FieldElem, delta: &FieldElem) -> Result<BigInt> {
    if delta.is_zero() {
        return Err(domain("delta must be nonzero"));
    }
    let x = &(&(theta_n * theta_n) * disc) * delta;
    let n = x.norm();
    let d = &n * &n;
    if !d.is_integer() {
        return Err(inconsistent(format!("deg(phi) = {d} is not an integer")));
    }
    Ok(d.to_integer())
}

/// Is phi an isomorphism (deg 1)?
pub fn is_principal_degree(theta_n: &FieldElem, disc: &FieldElem, delta: &FieldElem) -> Result<bool> {
    Ok(degree_of_phi(theta_n, disc, delta)?.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> FieldElem {
        FieldElem::from_int(1, n)
    }

    #[test]
    fn discriminants() {
        let b = discriminant_of(&(-1).into(), &3.into()).unwrap();
        assert_eq!(b.ramified_finite, vec![2, 3]);
        assert!(b.totally_indefinite);
        let b = discriminant_of(&(-1).into(), &(-1).into()).unwrap();
        assert_eq!(b.ramified_finite, vec![2]);
        assert!(!b.totally_indefinite);
        let b = discriminant_of(&1.into(), &1.into()).unwrap();
        assert!(!b.division);
    }

    #[test]
    fn identity_and_swap() {
        let alg = discriminant_of(&3.into(), &(-1).into()).unwrap();
        // mu = i: diagonal, delta = -3 < 0, orientation undefined
        let mu = PureQuaternion::new(&alg, q(1), q(0), q(0)).unwrap();
        let o = orientation(&alg, &mu, 0).unwrap();
        assert_eq!(o, Orientation { det_sign: None, delta_sign: -1 });
        // mu = j in (3, -1): [[0, 1], [-1, 0]] = omega with delta = 1
        let mu = PureQuaternion::new(&alg, q(0), q(1), q(0)).unwrap();
        assert_eq!(orientation(&alg, &mu, 0).unwrap().det_sign, Some(1));
        // the swap conjugate of omega is -omega
        assert_eq!(orientation(&alg, &mu.neg(), 0).unwrap().det_sign, Some(-1));
    }

    #[test]
    fn index_table() {
        assert_eq!(local_index(1, 1, 1), 0);
        assert_eq!(local_index(-1, 1, -1), 1);
        assert_eq!(local_index(1, 1, -1), 2);
    }

    #[test]
    fn degrees() {
        assert_eq!(degree_of_phi(&q(1), &q(6), &FieldElem::from_parts(1, 1, 0, 6)).unwrap(), 1.into());
        assert_eq!(degree_of_phi(&q(1), &q(6), &q(6)).unwrap(), 1296.into());
    }
}
