//! Quartic fields L = F(sqrt rho) over a real quadratic F of class number one:
//! maximal order, embeddings, class number and unit group.

pub mod analytic;
pub mod classgroup;
pub mod ideals;
pub mod lattice;
pub mod ring;
mod units;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{domain, Error, Result};
use ideals::base_primes;
use ring::{Elt, QuadRing, RelOrder, Rf};

pub use classgroup::ClassGroup;

/// Largest |D_L| accepted by the class group computation.
pub const DESK_SCALE_DISC: u64 = 100_000_000;

/// An archimedean place of L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Place {
    /// place of F below
    pub below: usize,
    pub real: bool,
    /// which root of the theta polynomial (real places only)
    pub branch: i8,
}

/// Conductor data of R_F[sqrt rho] at one prime above 2.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAdicExponent {
    pub prime_gen: Rf,
    pub ramification: u32,
    pub exponent: u32,
}

/// L = F(sqrt rho) with its maximal order R_F[theta], theta = (x + sqrt rho)/f.
#[derive(Debug, Clone)]
pub struct QuarticField {
    pub order: RelOrder,
    pub disc_f: u64,
    pub unit_f: Rf,
    pub rho: Rf,
    /// conductor of R_F[sqrt rho]
    pub conductor: Rf,
    pub x: Rf,
    pub two_adic: Vec<TwoAdicExponent>,
    pub abs_disc: BigInt,
    pub rel_disc_norm: BigInt,
    pub places: Vec<Place>,
    pub r1: u32,
    pub r2: u32,
}

impl QuarticField {
    /// Build L from a squarefree radicand rho in R_F (not a square).
    pub fn new(m: u64, disc_f: u64, unit_f: Rf, rho: Rf) -> Result<Self> {
        let ring = QuadRing::new(m);
        if rho.is_zero() {
            return Err(domain("radicand must be nonzero"));
        }
        if is_square(&ring, &rho) {
            return Err(domain("radicand is a square in F"));
        }
        check_squarefree(&ring, disc_f, &rho)?;
        let (conductor, x, two_adic) = conductor_of(&ring, disc_f, &rho)?;
        let f2 = ring.mul(&conductor, &conductor);
        let t = ring.div_exact(&ring.scale(&x, &BigInt::from(2)), &conductor).expect("f divides 2x");
        let n = ring
            .div_exact(&ring.sub(&ring.mul(&x, &x), &rho), &f2)
            .expect("x^2 = rho mod f^2");
        let order = RelOrder { ring, t, n };
        let d = order.theta_disc();
        let rel_disc_norm = order.ring.norm(&d).abs();
        let abs_disc = &rel_disc_norm * BigInt::from(disc_f * disc_f);
        let mut places = Vec::new();
        let mut r1 = 0;
        let mut r2 = 0;
        for k in 0..2 {
            if order.ring.emb(&d, k) > 0.0 {
                places.push(Place { below: k, real: true, branch: 1 });
                places.push(Place { below: k, real: true, branch: -1 });
                r1 += 2;
            }
        }
        for k in 0..2 {
            if order.ring.emb(&d, k) < 0.0 {
                places.push(Place { below: k, real: false, branch: 1 });
                r2 += 1;
            }
        }
        Ok(QuarticField {
            order,
            disc_f,
            unit_f,
            rho,
            conductor,
            x,
            two_adic,
            abs_disc,
            rel_disc_norm,
            places,
            r1,
            r2,
        })
    }

    pub fn unit_rank(&self) -> usize {
        (self.r1 + self.r2) as usize - 1
    }

    pub fn is_cm(&self) -> bool {
        self.r1 == 0
    }

    fn theta_at(&self, place: &Place) -> (f64, f64) {
        let k = place.below;
        let t = self.order.ring.emb(&self.order.t, k);
        let d = self.order.ring.emb(&self.order.theta_disc(), k);
        if place.real {
            ((t + place.branch as f64 * d.sqrt()) / 2.0, 0.0)
        } else {
            (t / 2.0, (-d).sqrt() / 2.0)
        }
    }

    /// Complex value of an element at a place.
    pub fn embed(&self, x: &Elt, place: &Place) -> (f64, f64) {
        let (tr, ti) = self.theta_at(place);
        let u = self.order.ring.emb(&x.u, place.below);
        let v = self.order.ring.emb(&x.v, place.below);
        (u + v * tr, v * ti)
    }

    /// Images of the Z-basis {1, w, theta, w theta} at every place.
    pub fn basis_images(&self) -> Vec<[(f64, f64); 4]> {
        let basis = [[1i64, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        self.places
            .iter()
            .map(|pl| {
                let mut out = [(0.0, 0.0); 4];
                for (i, b) in basis.iter().enumerate() {
                    out[i] = self.embed(&Elt::from_i64(b), pl);
                }
                out
            })
            .collect()
    }

    /// Weighted T2 form: sum over embeddings of exp(2 x_place)|sigma(a)|^2.
    pub fn t2_gram(&self, weights: &[f64]) -> lattice::Gram {
        let imgs = self.basis_images();
        let mut g = vec![vec![0.0; 4]; 4];
        for (pi, pl) in self.places.iter().enumerate() {
            let mult = if pl.real { 1.0 } else { 2.0 };
            let w = (2.0 * weights[pi]).exp() * mult;
            for i in 0..4 {
                for j in 0..4 {
                    let (a, b) = imgs[pi][i];
                    let (c, d) = imgs[pi][j];
                    g[i][j] += w * (a * c + b * d);
                }
            }
        }
        g
    }

    /// Logarithmic embedding (real: ln|s|, complex: 2 ln|s|).
    pub fn log_vector(&self, x: &Elt) -> Vec<f64> {
        self.places
            .iter()
            .map(|pl| {
                let (a, b) = self.embed(x, pl);
                let l = (a * a + b * b).sqrt().ln();
                if pl.real {
                    l
                } else {
                    2.0 * l
                }
            })
            .collect()
    }

    /// Minkowski bound for ideal classes.
    pub fn minkowski_bound(&self) -> f64 {
        (4.0 / std::f64::consts::PI).powi(self.r2 as i32) * (24.0 / 256.0) * self.abs_disc.to_f64().unwrap().sqrt()
    }

    /// Regulator of F (log of the fundamental unit).
    pub fn reg_f(&self) -> f64 {
        self.order.ring.emb(&self.unit_f, 0).abs().ln()
    }

    pub fn check_desk_scale(&self) -> Result<()> {
        if self.abs_disc > BigInt::from(DESK_SCALE_DISC) {
            return Err(Error::DeskScaleExceeded(format!(
                "|D_L| = {} exceeds {DESK_SCALE_DISC}",
                self.abs_disc
            )));
        }
        Ok(())
    }
}

fn is_square(ring: &QuadRing, rho: &Rf) -> bool {
    let (e0, e1) = (ring.emb(rho, 0), ring.emb(rho, 1));
    if e0 < 0.0 || e1 < 0.0 {
        return false;
    }
    // x = a + b w from its two embeddings, then verify exactly
    let (w0, w1) = (ring.w_emb[0], ring.w_emb[1]);
    for s1 in [1.0, -1.0] {
        let (x0, x1) = (e0.sqrt(), s1 * e1.sqrt());
        let b = ((x0 - x1) / (w0 - w1)).round();
        let a = (x0 - b * w0).round();
        let x = Rf::new(a as i64, b as i64);
        if &ring.mul(&x, &x) == rho {
            return true;
        }
    }
    false
}

fn check_squarefree(ring: &QuadRing, disc_f: u64, rho: &Rf) -> Result<()> {
    let n = ring.norm(rho);
    for (p, e) in crate::arith::factorize(&n)?.factors {
        if e < 2 {
            continue;
        }
        let p = p.to_u64().ok_or_else(|| Error::Unsupported("radicand norm has a large prime square".into()))?;
        for q in base_primes(ring, disc_f, p)? {
            if ring.valuation(&q.gen, rho) >= 2 {
                return Err(domain(format!("radicand is divisible by the square of a prime over {p}")));
            }
        }
    }
    Ok(())
}

// Largest f | 2 with x^2 = rho mod f^2 solvable, plus the per-prime exponents
// cross-checked against the k/e rule.
fn conductor_of(ring: &QuadRing, disc_f: u64, rho: &Rf) -> Result<(Rf, Rf, Vec<TwoAdicExponent>)> {
    let two = Rf::int(2);
    let primes = base_primes(ring, disc_f, 2)?;
    let mut exps: Vec<(Rf, u32)> = primes.iter().map(|q| (q.gen.clone(), ring.valuation(&q.gen, &two))).collect();
    // enumerate all divisors prod q^a, a <= e
    let mut cands: Vec<(Rf, Vec<u32>)> = vec![(Rf::one(), vec![])];
    for (g, e) in &exps {
        let mut next = Vec::new();
        for (c, v) in &cands {
            let mut cur = c.clone();
            for a in 0..=*e {
                let mut vv = v.clone();
                vv.push(a);
                next.push((cur.clone(), vv));
                cur = ring.mul(&cur, g);
            }
        }
        cands = next;
    }
    cands.sort_by_key(|(c, _)| std::cmp::Reverse(ring.norm(c).abs()));
    let mut found = None;
    for (f, v) in &cands {
        let f2 = ring.mul(f, f);
        if let Some(x) = ring.residues(&f2).into_iter().find(|x| ring.congruent(&ring.mul(x, x), rho, &f2)) {
            found = Some((f.clone(), x, v.clone()));
            break;
        }
    }
    let (f, x, v) = found.expect("f = 1 always qualifies");
    let mut out = Vec::new();
    for (i, (g, e)) in exps.drain(..).enumerate() {
        let q = &primes[i];
        if ring.divides(&g, rho) {
            if v[i] != 0 {
                return Err(Error::Inconsistency("conductor meets a prime dividing the radicand".into()));
            }
        } else {
            let rule = local_rule(ring, q, &g, e, rho)?;
            if rule != v[i] {
                return Err(Error::Inconsistency(format!(
                    "2-adic conductor exponent {} disagrees with the k/e rule {rule}",
                    v[i]
                )));
            }
        }
        out.push(TwoAdicExponent { prime_gen: g, ramification: e, exponent: v[i] });
    }
    Ok((f, x, out))
}

// rho = x0 + x_k pi^k + ..., representatives {0,1} or {0,1,w,1+w}.
fn local_rule(ring: &QuadRing, q: &ideals::BasePrime, g: &Rf, e: u32, rho: &Rf) -> Result<u32> {
    let reps: Vec<Rf> = if q.degree == 1 {
        vec![Rf::int(0), Rf::int(1)]
    } else {
        vec![Rf::int(0), Rf::int(1), Rf::new(0, 1), Rf::new(1, 1)]
    };
    let x0 = reps
        .iter()
        .find(|c| ring.congruent(c, rho, g))
        .expect("complete residue system");
    let diff = ring.sub(rho, x0);
    let k = (!diff.is_zero()).then(|| ring.valuation(g, &diff));
    conductor_rule(k, e)
}

/// The k/e rule for the local conductor exponent at a prime over 2 with
/// ramification e, where k is the valuation of rho - x0 (None when zero).
pub fn conductor_rule(k: Option<u32>, e: u32) -> Result<u32> {
    match k {
        Some(k) if k <= e + 1 => Ok(k / 2),
        Some(k) if k / 2 >= e => Ok(e),
        None => Ok(e),
        Some(k) => Err(Error::AmbiguousConductor(format!("k = {k}, e = {e}"))),
    }
}
