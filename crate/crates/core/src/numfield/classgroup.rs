//! Class number and unit group of L by relation search over a Minkowski
//! factor base, certified against the analytic value of hR.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::analytic::analytic_hr;
use super::ideals::{base_primes, decompose, LPrime};
use super::lattice::{echelon, lattice_index, short_vectors};
use super::ring::Elt;
use super::units::UnitLattice;
use super::QuarticField;
use crate::arith::small_primes;
use crate::error::{inconsistent, Result};

const ROUNDS: usize = 7;
const PER_FORM: usize = 60;

/// Class number, unit group and the certification data of L.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub h: u64,
    pub regulator: f64,
    pub analytic_hr: f64,
    /// number of roots of unity and a generator
    pub w: u64,
    pub zeta: Elt,
    pub fundamental_units: Vec<Elt>,
    pub factor_base: usize,
    pub relations: usize,
}

struct Search<'a> {
    qf: &'a QuarticField,
    fb: Vec<LPrime>,
    over: HashMap<u64, Vec<LPrime>>,
    bound: u64,
    relations: Vec<Vec<BigInt>>,
    seen: HashMap<Vec<u32>, (Elt, Vec<f64>)>,
    units: UnitLattice,
}

impl<'a> Search<'a> {
    fn new(qf: &'a QuarticField) -> Result<Self> {
        let bound = qf.minkowski_bound().floor().max(1.0) as u64;
        let mut fb = Vec::new();
        let mut over = HashMap::new();
        for &p in small_primes() {
            let p = p as u64;
            if p > bound {
                break;
            }
            let mut all = Vec::new();
            for q in base_primes(&qf.order.ring, qf.disc_f, p)? {
                all.extend(decompose(&qf.order, &q));
            }
            fb.extend(all.iter().filter(|l| l.norm <= bound).cloned());
            over.insert(p, all);
        }
        Ok(Search {
            qf,
            fb,
            over,
            bound,
            relations: Vec::new(),
            seen: HashMap::new(),
            units: UnitLattice::new(qf.unit_rank()),
        })
    }

    // Valuation vector over the factor base, if the element is smooth.
    fn smooth(&self, x: &Elt) -> Option<Vec<u32>> {
        let mut n = self.qf.order.abs_norm(x).abs();
        if n.is_zero() {
            return None;
        }
        let mut vec = vec![0u32; self.fb.len()];
        for &p in small_primes() {
            let p = p as u64;
            if n.is_one() {
                break;
            }
            if p > self.bound {
                return None;
            }
            let pb = BigInt::from(p);
            let mut vp = 0u32;
            while (&n % &pb).is_zero() {
                n /= &pb;
                vp += 1;
            }
            if vp == 0 {
                continue;
            }
            let mut total = 0;
            for lp in &self.over[&p] {
                let v = lp.valuation(&self.qf.order, x);
                if v == 0 {
                    continue;
                }
                total += v * lp.f;
                let idx = self.fb.iter().position(|f| f == lp)?;
                vec[idx] += v;
            }
            if total != vp {
                return None;
            }
        }
        n.is_one().then_some(vec)
    }

    fn offer(&mut self, x: Elt) {
        let Some(v) = self.smooth(&x) else { return };
        let log = self.qf.log_vector(&x);
        if let Some((y, ly)) = self.seen.get(&v) {
            if let Some(q) = self.qf.order.div_exact(&x, y) {
                let lq: Vec<f64> = log.iter().zip(ly).map(|(a, b)| a - b).collect();
                self.units.add(self.qf, q, lq);
            }
            return;
        }
        if v.iter().all(|&e| e == 0) {
            self.units.add(self.qf, x.clone(), log.clone());
        }
        self.relations.push(v.iter().map(|&e| BigInt::from(e)).collect());
        self.seen.insert(v, (x, log));
    }

    fn enumerate_form(&mut self, basis: &[[i64; 4]], weights: &[f64], per_form: usize) {
        let g0 = self.qf.t2_gram(weights);
        let k = basis.len();
        let mut g = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                for a in 0..4 {
                    for b in 0..4 {
                        g[i][j] += basis[i][a] as f64 * g0[a][b] * basis[j][b] as f64;
                    }
                }
            }
        }
        let lam = (0..k).map(|i| g[i][i]).fold(f64::INFINITY, f64::min);
        let mut bound = lam * 1.5;
        let mut vs = short_vectors(&g, bound, per_form);
        for _ in 0..6 {
            if vs.len() >= per_form / 2 {
                break;
            }
            bound *= 2.0;
            vs = short_vectors(&g, bound, per_form);
        }
        for y in vs {
            let c: Vec<i64> = (0..4).map(|a| (0..k).map(|i| y[i] * basis[i][a]).sum()).collect();
            self.offer(Elt::from_i64(&c));
        }
    }

    fn ideal_bases(&self) -> Vec<[[i64; 4]; 4]> {
        let o = &self.qf.order;
        let unit = [[1i64, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        self.fb
            .iter()
            .filter_map(|lp| {
                let mut rows = Vec::new();
                for g in lp.generators() {
                    for b in &unit {
                        let e = o.mul(&g, &Elt::from_i64(b));
                        rows.push(e.coords().to_vec());
                    }
                }
                let (piv, _) = echelon(rows, 4);
                let mut out = [[0i64; 4]; 4];
                for (i, r) in piv.iter().enumerate() {
                    for j in 0..4 {
                        out[i][j] = r[j].to_i64()?;
                    }
                }
                (piv.len() == 4).then_some(out)
            })
            .collect()
    }
}

// Weight vectors on the hyperplane sum d_p x_p = 0 at sup-radius in (lo, hi].
fn weight_shell(qf: &QuarticField, lo: i64, hi: i64, step: f64) -> Vec<Vec<f64>> {
    let pl = &qf.places;
    let r = qf.unit_rank();
    let deg = |i: usize| if pl[i].real { 1.0 } else { 2.0 };
    let last = pl.len() - 1;
    let mut out = Vec::new();
    if r == 0 {
        if lo < 0 {
            out.push(vec![0.0; pl.len()]);
        }
        return out;
    }
    let side = (2 * hi + 1) as usize;
    let total = side.pow(r as u32);
    for idx in 0..total {
        let mut t = idx;
        let mut n = vec![0i64; r];
        for v in n.iter_mut() {
            *v = (t % side) as i64 - hi;
            t /= side;
        }
        let sup = n.iter().map(|v| v.abs()).max().unwrap_or(0);
        if sup <= lo || sup > hi {
            continue;
        }
        let mut x = vec![0.0; pl.len()];
        for i in 0..r {
            x[i] += step * n[i] as f64;
            x[last] -= step * n[i] as f64 * deg(i) / deg(last);
        }
        out.push(x);
    }
    out
}

fn torsion(qf: &QuarticField) -> (u64, Elt) {
    let g = qf.t2_gram(&vec![0.0; qf.places.len()]);
    let o = &qf.order;
    let mut roots = vec![Elt::one()];
    for v in short_vectors(&g, 4.0, 1000) {
        let x = Elt::from_i64(&v);
        for y in [x.clone(), o.neg(&x)] {
            if (1..=60).any(|k| o.pow(&y, k).map_or(false, |z| z.is_one())) && !roots.contains(&y) {
                roots.push(y);
            }
        }
    }
    let w = roots.len() as u64;
    let gen = roots
        .iter()
        .find(|z| (1..w as i64).all(|k| !o.pow(z, k).unwrap().is_one()))
        .cloned()
        .unwrap_or_else(Elt::one);
    (w, gen)
}

/// Compute h(L), units and regulator, certified by the analytic hR.
pub fn class_group(qf: &QuarticField) -> Result<ClassGroup> {
    qf.check_desk_scale()?;
    let (w, zeta) = torsion(qf);
    let hr = analytic_hr(
        &qf.order,
        qf.disc_f,
        qf.reg_f(),
        &qf.rho,
        qf.abs_disc.to_f64().unwrap(),
        qf.r1,
        qf.r2,
        w,
    );
    let mut s = Search::new(qf)?;
    let base = Elt::base(qf.unit_f.clone());
    let lb = qf.log_vector(&base);
    s.units.add(qf, base, lb);
    let ideals = s.ideal_bases();
    let unit_basis = [[1i64, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
    let mut last = (0u64, 0.0f64);
    let mut prev_hi = -1i64;
    for round in 0..ROUNDS {
        let hi = if round == 0 { 0 } else { 1i64 << (round - 1) };
        for wv in weight_shell(qf, prev_hi, hi, 0.75) {
            s.enumerate_form(&unit_basis, &wv, PER_FORM);
            if round < 3 {
                for ib in &ideals {
                    s.enumerate_form(ib, &wv, PER_FORM / 2);
                }
            }
        }
        prev_hi = hi;
        let Some(hp) = lattice_index(&s.relations, s.fb.len()) else { continue };
        let Some(reg) = s.units.regulator() else { continue };
        let hp = hp.to_u64().ok_or_else(|| inconsistent("relation index overflow"))?;
        let ratio = hp as f64 * reg / hr;
        last = (hp, reg);
        if (ratio - 1.0).abs() < 0.25 {
            return Ok(ClassGroup {
                h: hp,
                regulator: reg,
                analytic_hr: hr,
                w,
                zeta,
                fundamental_units: s.units.basis.iter().map(|(e, _)| e.clone()).collect(),
                factor_base: s.fb.len(),
                relations: s.relations.len(),
            });
        }
        if ratio < 0.75 {
            return Err(inconsistent(format!(
                "h'R' = {} is below the analytic hR = {hr}",
                hp as f64 * reg
            )));
        }
    }
    Err(inconsistent(format!(
        "class group not certified: h' = {}, R' = {}, analytic hR = {hr}",
        last.0, last.1
    )))
}

/// Units of L as (element, log vector); torsion excluded.
pub fn unit_logs(qf: &QuarticField, cg: &ClassGroup) -> Vec<Vec<f64>> {
    cg.fundamental_units.iter().map(|u| qf.log_vector(u)).collect()
}
