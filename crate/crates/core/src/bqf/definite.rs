use num_integer::Roots;

use super::{gcd3, kernel_value};
use crate::arith::Discriminant;
use crate::error::{domain, Result};

// Count primitive reduced forms with middle coefficient in [lo, hi] (step 2).
fn count_b_range(n: i64, lo: i64, hi: i64) -> u64 {
    let mut h = 0u64;
    let mut b = lo;
    while b <= hi {
        let m = (b * b + n) / 4;
        let top = m.sqrt();
        let mut a = b.max(1);
        while a <= top {
            if m % a == 0 {
                let c = m / a;
                if gcd3(a, b, c) == 1 {
                    h += if b == 0 || a == b || a == c { 1 } else { 2 };
                }
            }
            a += 1;
        }
        b += 2;
    }
    h
}

/// Number of classes of primitive positive definite forms of discriminant d.
pub fn class_number_imag(d: &Discriminant) -> Result<u64> {
    let v = kernel_value(d)?;
    if v >= 0 {
        return Err(domain(format!("class_number_imag needs a negative discriminant, got {v}")));
    }
    if v == -3 || v == -4 {
        return Ok(1);
    }
    let n = -v;
    let bmax = (n / 3).sqrt();
    let b0 = n & 1;
    Ok(partitioned(n, b0, bmax))
}

#[cfg(feature = "parallel")]
fn partitioned(n: i64, b0: i64, bmax: i64) -> u64 {
    use rayon::prelude::*;
    if n < 2_000_000 {
        return count_b_range(n, b0, bmax);
    }
    // chunks start on the right parity
    let step = 64i64;
    let starts: Vec<i64> = (0..)
        .map(|k| b0 + 2 * step * k)
        .take_while(|&s| s <= bmax)
        .collect();
    starts
        .par_iter()
        .map(|&s| count_b_range(n, s, (s + 2 * step - 2).min(bmax)))
        .sum()
}

#[cfg(not(feature = "parallel"))]
fn partitioned(n: i64, b0: i64, bmax: i64) -> u64 {
    count_b_range(n, b0, bmax)
}

/// All primitive reduced forms (a, b, c) of a negative discriminant.
pub fn reduced_forms_imag(d: &Discriminant) -> Result<Vec<(i64, i64, i64)>> {
    let v = kernel_value(d)?;
    if v >= 0 {
        return Err(domain("reduced_forms_imag needs a negative discriminant"));
    }
    let n = -v;
    let mut out = Vec::new();
    let mut b = n & 1;
    while b * b <= n / 3 {
        let m = (b * b + n) / 4;
        let mut a = b.max(1);
        while a * a <= m {
            if m % a == 0 {
                let c = m / a;
                if gcd3(a, b, c) == 1 {
                    out.push((a, b, c));
                    if b != 0 && a != b && a != c {
                        out.push((a, -b, c));
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort();
    Ok(out)
}
