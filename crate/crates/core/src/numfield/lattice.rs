//! Small-dimension lattice tools: LLL on a Gram matrix, Fincke-Pohst
//! enumeration, and integer echelon forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type Gram = Vec<Vec<f64>>;

fn transformed(g0: &Gram, u: &[Vec<i64>]) -> Gram {
    let n = g0.len();
    let mut tmp = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            tmp[i][j] = (0..n).map(|k| u[i][k] as f64 * g0[k][j]).sum();
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| tmp[i][k] * u[j][k] as f64).sum();
        }
    }
    out
}

fn gram_schmidt(g: &Gram) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let s: f64 = (0..j).map(|k| mu[j][k] * mu[i][k] * b[k]).sum();
            mu[i][j] = (g[i][j] - s) / b[j];
        }
        b[i] = g[i][i] - (0..i).map(|k| mu[i][k] * mu[i][k] * b[k]).sum::<f64>();
    }
    (mu, b)
}

/// LLL reduction of the form g; returns the unimodular row transform.
pub fn lll_gram(g0: &Gram) -> Vec<Vec<i64>> {
    let n = g0.len();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let g = transformed(g0, &u);
            let (mu, _) = gram_schmidt(&g);
            let q = mu[k][j].round() as i64;
            if q != 0 {
                for c in 0..n {
                    u[k][c] -= q * u[j][c];
                }
            }
        }
        let g = transformed(g0, &u);
        let (mu, b) = gram_schmidt(&g);
        if b[k] < (0.75 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    u
}

/// Nonzero x (one of each pair +-x) with x^T g x <= bound, at most `limit` of them.
pub fn short_vectors(g: &Gram, bound: f64, limit: usize) -> Vec<Vec<i64>> {
    let u = lll_gram(g);
    let q = transformed(g, &u);
    let n = q.len();
    // q(x) = sum_i d_i (x_i + sum_{j>i} c_ij x_j)^2
    let mut c = vec![vec![0.0; n]; n];
    let mut d = vec![0.0; n];
    let mut a = q.clone();
    for i in 0..n {
        d[i] = a[i][i];
        if d[i] <= 0.0 {
            return Vec::new();
        }
        for j in i + 1..n {
            c[i][j] = a[i][j] / d[i];
        }
        for j in i + 1..n {
            for k in j..n {
                a[j][k] -= c[i][j] * c[i][k] * d[i];
                a[k][j] = a[j][k];
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let bound = bound * (1.0 + 1e-9) + 1e-9;
    enumerate(n - 1, &d, &c, &mut x, bound, limit, &mut out);
    out.into_iter()
        .map(|y| (0..n).map(|j| (0..n).map(|i| y[i] * u[i][j]).sum()).collect())
        .collect()
}

fn enumerate(
    i: usize,
    d: &[f64],
    c: &[Vec<f64>],
    x: &mut Vec<i64>,
    rem: f64,
    limit: usize,
    out: &mut Vec<Vec<i64>>,
) {
    let n = x.len();
    let center: f64 = -(i + 1..n).map(|j| c[i][j] * x[j] as f64).sum::<f64>();
    let r = (rem / d[i]).max(0.0).sqrt();
    // the top nonzero coordinate is taken positive
    let top_zero = x[i + 1..].iter().all(|&v| v == 0);
    let lo = if top_zero { 0 } else { (center - r).ceil() as i64 };
    let hi = (center + r).floor() as i64;
    for xi in lo..=hi {
        if out.len() >= limit {
            return;
        }
        let t = d[i] * (xi as f64 - center).powi(2);
        if t > rem {
            continue;
        }
        x[i] = xi;
        if i == 0 {
            if x.iter().any(|&v| v != 0) {
                out.push(x.clone());
            }
        } else {
            enumerate(i - 1, d, c, x, rem - t, limit, out);
        }
    }
    x[i] = 0;
}

/// Echelon form pivoting on the first `k` columns; rows that vanish there are
/// returned separately (their trailing columns carry kernel data).
pub fn echelon(mut rows: Vec<Vec<BigInt>>, k: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut pivots = Vec::new();
    for col in 0..k {
        let mut active: Vec<Vec<BigInt>> = Vec::new();
        let mut rest = Vec::new();
        for r in rows.into_iter() {
            if r[col].is_zero() {
                rest.push(r);
            } else {
                active.push(r);
            }
        }
        while active.len() > 1 {
            active.sort_by(|a, b| a[col].abs().cmp(&b[col].abs()));
            let (head, tail) = active.split_at_mut(1);
            let p = &head[0];
            for r in tail.iter_mut() {
                let q = r[col].div_floor(&p[col]);
                for (x, y) in r.iter_mut().zip(p.iter()) {
                    *x -= &q * y;
                }
            }
            let keep: Vec<Vec<BigInt>> = active.drain(..).collect();
            for r in keep {
                if r[col].is_zero() {
                    rest.push(r);
                } else {
                    active.push(r);
                }
            }
        }
        if let Some(mut p) = active.pop() {
            if p[col].is_negative() {
                for x in p.iter_mut() {
                    *x = -x.clone();
                }
            }
            // reduce earlier pivots to keep entries small
            pivots.push(p);
        }
        rows = rest;
    }
    (pivots, rows)
}

/// Index of the lattice spanned by `rows` in Z^k, or None when rank < k.
pub fn lattice_index(rows: &[Vec<BigInt>], k: usize) -> Option<BigInt> {
    if k == 0 {
        return Some(BigInt::from(1));
    }
    let (piv, _) = echelon(rows.to_vec(), k);
    if piv.len() < k {
        return None;
    }
    let mut det = BigInt::from(1);
    for (i, p) in piv.iter().enumerate() {
        if p[i].is_zero() {
            return None;
        }
        det *= &p[i];
    }
    Some(det.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(g: &Gram, bound: f64, r: i64) -> usize {
        let mut count = 0;
        let n = g.len();
        let total = (2 * r + 1).pow(n as u32);
        for idx in 0..total {
            let mut x = vec![0i64; n];
            let mut t = idx;
            for v in x.iter_mut() {
                *v = t % (2 * r + 1) - r;
                t /= 2 * r + 1;
            }
            if x.iter().all(|&v| v == 0) {
                continue;
            }
            let q: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g[i][j] * x[i] as f64 * x[j] as f64).sum();
            if q <= bound + 1e-9 {
                count += 1;
            }
        }
        count / 2
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let g = vec![
            vec![4.0, 1.0, 0.5, 0.0],
            vec![1.0, 3.0, 0.2, 0.7],
            vec![0.5, 0.2, 5.0, 1.1],
            vec![0.0, 0.7, 1.1, 2.5],
        ];
        for bound in [3.0, 6.0, 10.0, 20.0] {
            assert_eq!(short_vectors(&g, bound, 100_000).len(), brute(&g, bound, 6), "bound {bound}");
        }
    }

    #[test]
    fn skewed_form() {
        // a badly scaled basis of Z^2
        let g = vec![vec![1.0, 100.0], vec![100.0, 10001.0]];
        let v = short_vectors(&g, 1.5, 100);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn index() {
        let rows = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(1), BigInt::from(3)],
            vec![BigInt::from(0), BigInt::from(6)],
        ];
        assert_eq!(lattice_index(&rows, 2), Some(BigInt::from(6)));
        assert_eq!(lattice_index(&rows[..1], 2), None);
    }
}
