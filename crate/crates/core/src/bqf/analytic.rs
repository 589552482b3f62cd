use super::kernel_value;
use crate::arith::{kronecker_i64, Discriminant};
use crate::error::{domain, inconsistent, Result};

/// Class number from the finite character sum |sum (d/k) k| / |d| (w = 2).
pub fn analytic_h(d: &Discriminant) -> Result<u64> {
    let v = kernel_value(d)?;
    if !d.is_fundamental() {
        return Err(domain(format!("{v} is not a fundamental discriminant")));
    }
    if v >= -4 {
        return Err(domain(format!("analytic_h needs d < -4, got {v}")));
    }
    let n = -v;
    let mut sum: i128 = 0;
    for k in 1..n {
        sum += kronecker_i64(v, k) as i128 * k as i128;
    }
    let sum = sum.unsigned_abs();
    if sum % n as u128 != 0 {
        return Err(inconsistent(format!("character sum for {v} is not divisible by {n}")));
    }
    Ok((sum / n as u128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: i64) -> u64 {
        analytic_h(&Discriminant::new(v).unwrap()).unwrap()
    }

    #[test]
    fn frozen_values() {
        assert_eq!(a(-15), 2);
        assert_eq!(a(-23), 3);
        assert_eq!(a(-7), 1);
        assert_eq!(a(-840), 8);
    }

    #[test]
    fn rejects_non_fundamental() {
        assert!(analytic_h(&Discriminant::new(-60).unwrap()).is_err());
        assert!(analytic_h(&Discriminant::new(-4).unwrap()).is_err());
    }
}
