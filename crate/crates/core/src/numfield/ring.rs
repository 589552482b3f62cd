//! Integer arithmetic in R_F = Z[w] and in relative quadratic orders R_F[theta].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::FieldElem;

/// a + b w in R_F.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rf {
    pub a: BigInt,
    pub b: BigInt,
}

impl Rf {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Rf { a: a.into(), b: b.into() }
    }

    pub fn int(a: impl Into<BigInt>) -> Self {
        Rf { a: a.into(), b: BigInt::zero() }
    }

    pub fn zero() -> Self {
        Rf::int(0)
    }

    pub fn one() -> Self {
        Rf::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }
}

/// The ring of integers of Q(sqrt m) with w^2 = s w + r.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRing {
    pub m: u64,
    pub s: i64,
    pub r: i64,
    /// images of w under the two real places
    pub w_emb: [f64; 2],
}

impl QuadRing {
    pub fn new(m: u64) -> Self {
        let (s, r) = if m % 4 == 1 { (1, (m as i64 - 1) / 4) } else { (0, m as i64) };
        let rt = (m as f64).sqrt();
        let w_emb = if s == 1 { [(1.0 + rt) / 2.0, (1.0 - rt) / 2.0] } else { [rt, -rt] };
        QuadRing { m, s, r, w_emb }
    }

    pub fn add(&self, x: &Rf, y: &Rf) -> Rf {
        Rf { a: &x.a + &y.a, b: &x.b + &y.b }
    }

    pub fn sub(&self, x: &Rf, y: &Rf) -> Rf {
        Rf { a: &x.a - &y.a, b: &x.b - &y.b }
    }

    pub fn neg(&self, x: &Rf) -> Rf {
        Rf { a: -&x.a, b: -&x.b }
    }

    pub fn mul(&self, x: &Rf, y: &Rf) -> Rf {
        let bb = &x.b * &y.b;
        Rf {
            a: &x.a * &y.a + &bb * self.r,
            b: &x.a * &y.b + &x.b * &y.a + bb * self.s,
        }
    }

    pub fn scale(&self, x: &Rf, k: &BigInt) -> Rf {
        Rf { a: &x.a * k, b: &x.b * k }
    }

    pub fn conj(&self, x: &Rf) -> Rf {
        Rf { a: &x.a + &x.b * self.s, b: -&x.b }
    }

    pub fn norm(&self, x: &Rf) -> BigInt {
        &x.a * &x.a + &x.a * &x.b * self.s - &x.b * &x.b * self.r
    }

    /// x / y when the quotient is integral.
    pub fn div_exact(&self, x: &Rf, y: &Rf) -> Option<Rf> {
        if y.is_zero() {
            return None;
        }
        let n = self.norm(y);
        let p = self.mul(x, &self.conj(y));
        let (qa, ra) = p.a.div_rem(&n);
        let (qb, rb) = p.b.div_rem(&n);
        (ra.is_zero() && rb.is_zero()).then_some(Rf { a: qa, b: qb })
    }

    pub fn divides(&self, y: &Rf, x: &Rf) -> bool {
        self.div_exact(x, y).is_some()
    }

    pub fn pow(&self, x: &Rf, e: u32) -> Rf {
        let mut out = Rf::one();
        for _ in 0..e {
            out = self.mul(&out, x);
        }
        out
    }

    pub fn emb(&self, x: &Rf, place: usize) -> f64 {
        x.a.to_f64().unwrap_or(f64::NAN) + x.b.to_f64().unwrap_or(f64::NAN) * self.w_emb[place]
    }

    pub fn to_elem(&self, x: &Rf) -> FieldElem {
        FieldElem::from_coords(self.m, &x.a, &x.b)
    }

    pub fn from_elem(&self, e: &FieldElem) -> Option<Rf> {
        e.integral_coords().map(|(a, b)| Rf { a, b })
    }

    /// Exponent of the prime generated by g in nonzero x.
    pub fn valuation(&self, g: &Rf, x: &Rf) -> u32 {
        debug_assert!(!x.is_zero());
        let mut v = 0;
        let mut cur = x.clone();
        while let Some(q) = self.div_exact(&cur, g) {
            cur = q;
            v += 1;
        }
        v
    }

    /// Is x congruent to y modulo f?
    pub fn congruent(&self, x: &Rf, y: &Rf, f: &Rf) -> bool {
        self.divides(f, &self.sub(x, y))
    }

    /// A set of representatives of R_F / (f).
    pub fn residues(&self, f: &Rf) -> Vec<Rf> {
        let n = self.norm(f).abs().to_i64().expect("small modulus");
        let mut reps: Vec<Rf> = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let c = Rf::new(a, b);
                if !reps.iter().any(|x| self.congruent(x, &c, f)) {
                    reps.push(c);
                }
                if reps.len() as i64 == n {
                    return reps;
                }
            }
        }
        reps
    }

    /// Canonical representative of x modulo f among `reps`.
    pub fn reduce<'a>(&self, x: &Rf, f: &Rf, reps: &'a [Rf]) -> &'a Rf {
        reps.iter()
            .find(|c| self.congruent(x, c, f))
            .expect("residue set is complete")
    }
}

/// u + v theta in R_F[theta], theta^2 = t theta - n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Elt {
    pub u: Rf,
    pub v: Rf,
}

impl Elt {
    pub fn from_coords(c: &[BigInt; 4]) -> Self {
        Elt { u: Rf { a: c[0].clone(), b: c[1].clone() }, v: Rf { a: c[2].clone(), b: c[3].clone() } }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Elt { u: Rf::new(c[0], c[1]), v: Rf::new(c[2], c[3]) }
    }

    pub fn coords(&self) -> [BigInt; 4] {
        [self.u.a.clone(), self.u.b.clone(), self.v.a.clone(), self.v.b.clone()]
    }

    pub fn base(x: Rf) -> Self {
        Elt { u: x, v: Rf::zero() }
    }

    pub fn one() -> Self {
        Elt::base(Rf::one())
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }
}

/// Relative quadratic order R_F[theta] (the maximal order of L once built).
#[derive(Debug, Clone)]
pub struct RelOrder {
    pub ring: QuadRing,
    pub t: Rf,
    pub n: Rf,
}

impl RelOrder {
    pub fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        let r = &self.ring;
        let vv = r.mul(&x.v, &y.v);
        Elt {
            u: r.sub(&r.mul(&x.u, &y.u), &r.mul(&self.n, &vv)),
            v: r.add(&r.add(&r.mul(&x.u, &y.v), &r.mul(&x.v, &y.u)), &r.mul(&self.t, &vv)),
        }
    }

    pub fn neg(&self, x: &Elt) -> Elt {
        Elt { u: self.ring.neg(&x.u), v: self.ring.neg(&x.v) }
    }

    pub fn conj(&self, x: &Elt) -> Elt {
        let r = &self.ring;
        Elt { u: r.add(&x.u, &r.mul(&x.v, &self.t)), v: r.neg(&x.v) }
    }

    pub fn rel_norm(&self, x: &Elt) -> Rf {
        let r = &self.ring;
        let uu = r.mul(&x.u, &x.u);
        let uv = r.mul(&x.u, &x.v);
        let vv = r.mul(&x.v, &x.v);
        r.add(&r.add(&uu, &r.mul(&self.t, &uv)), &r.mul(&self.n, &vv))
    }

    pub fn abs_norm(&self, x: &Elt) -> BigInt {
        self.ring.norm(&self.rel_norm(x))
    }

    /// x / y when the quotient lies in the order.
    pub fn div_exact(&self, x: &Elt, y: &Elt) -> Option<Elt> {
        let r = &self.ring;
        let ny = self.rel_norm(y);
        let p = self.mul(x, &self.conj(y));
        Some(Elt { u: r.div_exact(&p.u, &ny)?, v: r.div_exact(&p.v, &ny)? })
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self, x: &Elt) -> Option<Elt> {
        self.div_exact(&Elt::one(), x)
    }

    pub fn pow(&self, x: &Elt, e: i64) -> Option<Elt> {
        let base = if e < 0 { self.unit_inverse(x)? } else { x.clone() };
        let mut out = Elt::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = self.mul(&out, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        Some(out)
    }

    /// Discriminant t^2 - 4n of the minimal polynomial of theta over F.
    pub fn theta_disc(&self) -> Rf {
        let r = &self.ring;
        r.sub(&r.mul(&self.t, &self.t), &r.scale(&self.n, &BigInt::from(4)))
    }

    /// Is x congruent to an element of R_F modulo f O_L (f in R_F)?
    pub fn in_suborder(&self, x: &Elt, f: &Rf) -> bool {
        self.ring.divides(f, &x.v)
    }
}
