use std::collections::HashMap;

use num_integer::Roots;
use serde::Serialize;

use super::{gcd3, kernel_value, pell_norm_sign};
use crate::arith::{factorize_u64, Discriminant};
use crate::error::{domain, inconsistent, Result};

/// Ordinary (wide) and narrow class numbers of a real quadratic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RealClassNumbers {
    pub h_wide: u64,
    pub h_narrow: u64,
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize_u64(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out
}

// Reduced: 0 < b < sqrt d and sqrt d - b < 2|a| < sqrt d + b.
fn reduced_forms(d: i64, s: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let mut b = if d & 1 == 1 { 1 } else { 2 };
    while b <= s {
        let n = (d - b * b) / 4;
        for a in divisors(n as u64) {
            let a = a as i64;
            if 2 * a + b > s && 2 * a - b <= s {
                let c = n / a;
                if gcd3(a, b, c) == 1 {
                    out.push((a, b, -c));
                    out.push((-a, b, c));
                }
            }
        }
        b += 2;
    }
    out
}

fn rho(d: i64, s: i64, (_, b, c): (i64, i64, i64)) -> (i64, i64, i64) {
    let m = 2 * c.abs();
    let r = s - (s + b).rem_euclid(m);
    (c, r, (r * r - d) / (4 * c))
}

/// Narrow class number as the number of cycles of reduced forms.
pub fn narrow_class_number(d: &Discriminant) -> Result<u64> {
    let v = kernel_value(d)?;
    if v <= 0 || d.is_square() {
        return Err(domain(format!("{v} is not a positive non-square discriminant")));
    }
    let s = v.sqrt();
    let forms = reduced_forms(v, s);
    let index: HashMap<(i64, i64, i64), usize> =
        forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0u64;
    for start in 0..forms.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            let next = rho(v, s, forms[i]);
            i = *index
                .get(&next)
                .ok_or_else(|| inconsistent(format!("rho left the reduced set at {next:?}")))?;
        }
    }
    Ok(cycles)
}

/// (h_wide, h_narrow) for a positive non-square discriminant.
pub fn class_number_real(d: &Discriminant) -> Result<RealClassNumbers> {
    let h_narrow = narrow_class_number(d)?;
    let h_wide = if pell_norm_sign(d)? == -1 {
        h_narrow
    } else if h_narrow % 2 == 0 {
        h_narrow / 2
    } else {
        return Err(inconsistent(format!("odd narrow class number {h_narrow} with unit of norm +1")));
    };
    Ok(RealClassNumbers { h_wide, h_narrow })
}
