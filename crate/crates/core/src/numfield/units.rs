//! Exact unit lattice maintained through log vectors.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::lattice::{echelon, lll_gram};
use super::ring::Elt;
use super::QuarticField;

const TORSION_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct UnitLattice {
    pub rank: usize,
    /// exact units with their full log vectors
    pub basis: Vec<(Elt, Vec<f64>)>,
}

fn trunc(v: &[f64], r: usize) -> Vec<f64> {
    v[..r].to_vec()
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        if a[p][c].abs() < 1e-300 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    d
}

fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &x)| {
        let mut r = r.clone();
        r.push(x);
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(p, c);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for j in c..=n {
                    m[i][j] -= f * m[c][j];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

impl UnitLattice {
    pub fn new(rank: usize) -> Self {
        UnitLattice { rank, basis: Vec::new() }
    }

    fn gram(&self) -> Vec<Vec<f64>> {
        let k = self.basis.len();
        let r = self.rank;
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        trunc(&self.basis[i].1, r)
                            .iter()
                            .zip(trunc(&self.basis[j].1, r))
                            .map(|(a, b)| a * b)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn regulator(&self) -> Option<f64> {
        if self.basis.len() < self.rank {
            return None;
        }
        if self.rank == 0 {
            return Some(1.0);
        }
        let m: Vec<Vec<f64>> = self.basis.iter().map(|(_, l)| trunc(l, self.rank)).collect();
        Some(det(&m).abs())
    }

    // Coefficients of v in the span of the basis, with the residual size.
    fn coefficients(&self, v: &[f64]) -> Option<(Vec<f64>, f64)> {
        let r = self.rank;
        let g = self.gram();
        let rhs: Vec<f64> = self
            .basis
            .iter()
            .map(|(_, l)| trunc(l, r).iter().zip(&v[..r]).map(|(a, b)| a * b).sum())
            .collect();
        let c = solve(&g, &rhs)?;
        let mut res = 0.0;
        for i in 0..r {
            let approx: f64 = self.basis.iter().zip(&c).map(|((_, l), ci)| l[i] * ci).sum();
            res += (v[i] - approx).powi(2);
        }
        Some((c, res.sqrt()))
    }

    /// Offer a unit; returns true when the lattice grew.
    pub fn add(&mut self, qf: &QuarticField, eta: Elt, log: Vec<f64>) -> bool {
        let r = self.rank;
        let size: f64 = log[..r].iter().map(|x| x * x).sum::<f64>().sqrt();
        if size < TORSION_TOL || r == 0 {
            return false;
        }
        if self.basis.is_empty() {
            self.basis.push((eta, log));
            return true;
        }
        let (c, res) = match self.coefficients(&log) {
            Some(x) => x,
            None => return false,
        };
        if res > 1e-6 * (1.0 + size) {
            if self.basis.len() < r {
                self.basis.push((eta, log));
                self.reduce(qf);
                return true;
            }
            return false;
        }
        // rational dependence: find a common denominator
        let den = (1..=2000i64).find(|&d| c.iter().all(|x| (x * d as f64 - (x * d as f64).round()).abs() < 1e-5 * d as f64));
        let d = match den {
            Some(1) | None => return false,
            Some(d) => d,
        };
        let k = self.basis.len();
        // rows: d*e_j for basis elements and d*c for eta, each tagged with its generator
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for j in 0..=k {
            let mut row = vec![BigInt::zero(); 2 * k + 1];
            if j < k {
                row[j] = BigInt::from(d);
            } else {
                for (i, x) in c.iter().enumerate() {
                    row[i] = BigInt::from((x * d as f64).round() as i64);
                }
            }
            row[k + j] = BigInt::from(1);
            rows.push(row);
        }
        let (piv, _) = echelon(rows, k);
        let mut gens: Vec<(Elt, Vec<f64>)> = self.basis.clone();
        gens.push((eta, log));
        let mut new_basis = Vec::new();
        for p in piv {
            let exps: Vec<i64> = p[k..].iter().map(|x| x.to_i64().unwrap_or(0)).collect();
            match combine(qf, &gens, &exps) {
                Some(u) => new_basis.push(u),
                None => return false,
            }
        }
        self.basis = new_basis;
        self.reduce(qf);
        true
    }

    /// LLL on the log lattice to keep the exact units small.
    pub fn reduce(&mut self, qf: &QuarticField) {
        if self.basis.len() < 2 {
            return;
        }
        let u = lll_gram(&self.gram());
        let gens = self.basis.clone();
        let mut out = Vec::new();
        for row in u {
            match combine(qf, &gens, &row) {
                Some(x) => out.push(x),
                None => return,
            }
        }
        self.basis = out;
    }
}

/// prod gens_j^{e_j} computed exactly, logs tracked additively.
pub fn combine(qf: &QuarticField, gens: &[(Elt, Vec<f64>)], exps: &[i64]) -> Option<(Elt, Vec<f64>)> {
    let o = &qf.order;
    let mut acc = Elt::one();
    let mut log = vec![0.0; gens[0].1.len()];
    for ((g, l), &e) in gens.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        acc = o.mul(&acc, &o.pow(g, e)?);
        for (a, b) in log.iter_mut().zip(l) {
            *a += e as f64 * b;
        }
    }
    Some((acc, log))
}
