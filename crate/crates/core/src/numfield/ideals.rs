//! Prime ideals of L = R_F[theta] above a rational prime, via Dedekind-Kummer
//! over the primes of F.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::ring::{Elt, QuadRing, RelOrder, Rf};
use crate::arith::{kronecker_i64, sqrt_mod_prime};
use crate::error::{inconsistent, Error, Result};

/// A prime of F with its residue field data.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePrime {
    pub p: u64,
    pub degree: u32,
    pub gen: Rf,
    /// w mod p for degree-one primes
    pub root: Option<u64>,
}

/// Residue field element c0 + c1 w (c1 = 0 in degree one).
pub type Res = (u64, u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split(Res),
    Ramified(Res),
    Inert,
}

/// A prime ideal of L.
#[derive(Debug, Clone, PartialEq)]
pub struct LPrime {
    pub below: BasePrime,
    pub splitting: Splitting,
    /// residue degree over Q
    pub f: u32,
    pub norm: u64,
}

impl BasePrime {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.degree)
    }

    pub fn res(&self, ring: &QuadRing, x: &Rf) -> Res {
        let p = BigInt::from(self.p);
        let a = x.a.mod_floor(&p).to_u64().unwrap();
        let b = x.b.mod_floor(&p).to_u64().unwrap();
        match self.root {
            Some(w) => ((a as u128 + b as u128 * w as u128).rem_euclid(self.p as u128) as u64, 0),
            None => {
                let _ = ring;
                (a, b)
            }
        }
    }

    fn mul(&self, ring: &QuadRing, x: Res, y: Res) -> Res {
        let p = self.p as i128;
        if self.degree == 1 {
            return (((x.0 as i128 * y.0 as i128) % p) as u64, 0);
        }
        let (a, b, c, d) = (x.0 as i128, x.1 as i128, y.0 as i128, y.1 as i128);
        let bd = b * d % p;
        let s = ring.s as i128;
        let r = (ring.r as i128).rem_euclid(p);
        (((a * c + r * bd) % p) as u64, ((a * d + b * c + s * bd) % p) as u64)
    }

    fn add(&self, x: Res, y: Res) -> Res {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn elements(&self) -> impl Iterator<Item = Res> + '_ {
        let p = self.p;
        let top = if self.degree == 1 { 1 } else { p };
        (0..top).flat_map(move |b| (0..p).map(move |a| (a, b)))
    }

    /// Lift of a residue to R_F.
    pub fn lift(&self, x: Res) -> Rf {
        Rf::new(x.0, x.1)
    }
}

/// Primes of F above p with generators (class number one is assumed).
pub fn base_primes(ring: &QuadRing, disc_f: u64, p: u64) -> Result<Vec<BasePrime>> {
    let k = kronecker_i64(disc_f as i64, p as i64);
    if k == -1 {
        return Ok(vec![BasePrime { p, degree: 2, gen: Rf::int(p), root: None }]);
    }
    let mut roots: Vec<u64> = if p < 64 {
        (0..p)
            .filter(|&w| {
                let w = w as i128;
                (w * w - ring.s as i128 * w - ring.r as i128).rem_euclid(p as i128) == 0
            })
            .collect()
    } else {
        let pi = p as i128;
        let dd = ((ring.s * ring.s + 4 * ring.r) as i128).rem_euclid(pi) as u64;
        let t = sqrt_mod_prime(dd, p).ok_or_else(|| inconsistent("no root above a split prime"))? as i128;
        let inv2 = (pi + 1) / 2;
        [t, pi - t].iter().map(|z| ((ring.s as i128 + z) * inv2).rem_euclid(pi) as u64).collect()
    };
    roots.sort();
    roots.dedup();
    roots
        .into_iter()
        .map(|w| {
            let gen = prime_generator(ring, p, w)?;
            Ok(BasePrime { p, degree: 1, gen, root: Some(w) })
        })
        .collect()
}

fn prime_generator(ring: &QuadRing, p: u64, w: u64) -> Result<Rf> {
    let (s, r, pi) = (ring.s as i128, ring.r as i128, p as i128);
    let bound = 64 * ((p as f64).sqrt() as i128 + 16);
    for b in 0..=bound {
        for sign in [1i128, -1] {
            let disc = s * s * b * b + 4 * (r * b * b + sign * pi);
            if disc < 0 {
                continue;
            }
            let t = num_integer::Roots::sqrt(&disc);
            if t * t != disc {
                continue;
            }
            for a2 in [-s * b + t, -s * b - t] {
                if a2 % 2 != 0 {
                    continue;
                }
                let a = a2 / 2;
                for (aa, bb) in [(a, b), (-a, -b)] {
                    if (aa + bb * w as i128).rem_euclid(pi) == 0 {
                        return Ok(Rf::new(aa as i64, bb as i64));
                    }
                }
            }
        }
    }
    Err(Error::SearchExhausted(format!("generator of a prime above {p}")))
}

/// Decompose a prime of F in L.
pub fn decompose(order: &RelOrder, q: &BasePrime) -> Vec<LPrime> {
    let ring = &order.ring;
    let t = q.res(ring, &order.t);
    let n = q.res(ring, &order.n);
    let p = q.p;
    // roots of T^2 - t T + n over the residue field
    let neg_t = ((p - t.0) % p, (p - t.1) % p);
    let roots: Vec<Res> = if q.degree == 1 && p > 2 {
        let tt = t.0 as u128;
        let disc = ((tt * tt + 4 * (p as u128 - n.0 as u128)) % p as u128) as u64;
        match sqrt_mod_prime(disc, p) {
            None => vec![],
            Some(z) => {
                let inv2 = (p + 1) / 2;
                let mut v: Vec<Res> = [z, (p - z) % p]
                    .iter()
                    .map(|&z| ((((t.0 + z) % p) as u128 * inv2 as u128 % p as u128) as u64, 0))
                    .collect();
                v.sort();
                v.dedup();
                v
            }
        }
    } else {
        q.elements()
            .filter(|&x| {
                let v = q.add(q.add(q.mul(ring, x, x), q.mul(ring, neg_t, x)), n);
                v == (0, 0)
            })
            .collect()
    };
    let base_norm = q.norm();
    match roots.len() {
        0 => vec![LPrime { below: q.clone(), splitting: Splitting::Inert, f: 2 * q.degree, norm: base_norm * base_norm }],
        1 => vec![LPrime { below: q.clone(), splitting: Splitting::Ramified(roots[0]), f: q.degree, norm: base_norm }],
        _ => roots
            .iter()
            .map(|&r| LPrime { below: q.clone(), splitting: Splitting::Split(r), f: q.degree, norm: base_norm })
            .collect(),
    }
}

impl LPrime {
    /// Valuation of a nonzero element.
    pub fn valuation(&self, order: &RelOrder, x: &Elt) -> u32 {
        let ring = &order.ring;
        let g = &self.below.gen;
        let c = match (x.u.is_zero(), x.v.is_zero()) {
            (true, _) => ring.valuation(g, &x.v),
            (_, true) => ring.valuation(g, &x.u),
            _ => ring.valuation(g, &x.u).min(ring.valuation(g, &x.v)),
        };
        let gc = ring.pow(g, c);
        let xp = Elt { u: ring.div_exact(&x.u, &gc).unwrap(), v: ring.div_exact(&x.v, &gc).unwrap() };
        match self.splitting {
            Splitting::Inert => c,
            Splitting::Ramified(_) => 2 * c + ring.valuation(g, &order.rel_norm(&xp)),
            Splitting::Split(root) => {
                let u = self.below.res(ring, &xp.u);
                let v = self.below.res(ring, &xp.v);
                let q = &self.below;
                if q.add(u, q.mul(ring, v, root)) == (0, 0) {
                    c + ring.valuation(g, &order.rel_norm(&xp))
                } else {
                    c
                }
            }
        }
    }

    /// Z-generators of the ideal: the prime of F and theta - root.
    pub fn generators(&self) -> Vec<Elt> {
        let g = Elt::base(self.below.gen.clone());
        match self.splitting {
            Splitting::Inert => vec![g],
            Splitting::Split(r) | Splitting::Ramified(r) => {
                let lift = self.below.lift(r);
                vec![g, Elt { u: Rf { a: -lift.a, b: -lift.b }, v: Rf::one() }]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2_sqrt_m7() -> RelOrder {
        // theta = (1 + sqrt(-7))/2
        RelOrder { ring: QuadRing::new(2), t: Rf::int(1), n: Rf::int(2) }
    }

    #[test]
    fn splitting_types() {
        let o = q2_sqrt_m7();
        // 7 = (3+sqrt2)(3-sqrt2), each ramified in L
        let over7 = base_primes(&o.ring, 8, 7).unwrap();
        assert_eq!(over7.len(), 2);
        for q in &over7 {
            let ps = decompose(&o, q);
            assert_eq!(ps.len(), 1);
            assert!(matches!(ps[0].splitting, Splitting::Ramified(_)));
        }
        // sqrt2 above 2: -7 = 1 mod 8 so it splits
        let over2 = base_primes(&o.ring, 8, 2).unwrap();
        assert_eq!(over2.len(), 1);
        assert_eq!(decompose(&o, &over2[0]).len(), 2);
    }

    #[test]
    fn valuations_sum_to_norm() {
        let o = q2_sqrt_m7();
        for c in [[3i64, 1, 2, -1], [5, 0, 1, 1], [2, 2, 0, 4], [7, 0, 0, 0]] {
            let x = Elt::from_i64(&c);
            let n = o.abs_norm(&x);
            for p in [2u64, 3, 5, 7, 11, 13] {
                let mut vp = 0u32;
                let mut m = n.clone();
                let pb = BigInt::from(p);
                while (&m % &pb) == BigInt::from(0) {
                    m /= &pb;
                    vp += 1;
                }
                let mut total = 0;
                for q in base_primes(&o.ring, 8, p).unwrap() {
                    for lp in decompose(&o, &q) {
                        total += lp.f * lp.valuation(&o, &x);
                    }
                }
                assert_eq!(total, vp, "x={c:?} p={p}");
            }
        }
    }
}
