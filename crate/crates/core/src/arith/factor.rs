use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{mulmod, powmod};
use crate::error::{domain, Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;
// Miller-Rabin with these bases is exact below 3.317e24.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Sorted prime factorization of |n|.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimeFactorization {
    pub factors: Vec<(BigUint, u32)>,
}

impl PrimeFactorization {
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Number of distinct primes.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::one()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            for d in &out {
                let mut q = d.clone();
                next.push(q.clone());
                for _ in 0..*e {
                    q *= p;
                    next.push(q.clone());
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

/// Primes below one million, sieved once.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(TRIAL_LIMIT))
}

fn sieve(limit: u32) -> Vec<u32> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mr_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn mr_big(n: &BigUint) -> Result<bool> {
    if let Some(v) = n.to_u64() {
        return Ok(mr_u64(v));
    }
    let bound: BigUint = "3317044064679887385961981".parse().unwrap();
    if n >= &bound {
        return Err(Error::Unsupported(format!(
            "primality of {n} is beyond the certified Miller-Rabin range"
        )));
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in &MR_BASES {
        let a = BigUint::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Deterministic primality for values below the certified bound.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    mr_big(n)
}

// Brent's variant of Pollard rho; returns a nontrivial factor of a composite n.
fn rho(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 64u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn split_large(n: BigUint, out: &mut Vec<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if mr_big(&n)? {
        out.push(n);
        return Ok(());
    }
    let r = n.sqrt();
    if &r * &r == n {
        split_large(r.clone(), out)?;
        return split_large(r, out);
    }
    let d = rho(&n);
    let q = &n / &d;
    split_large(d, out)?;
    split_large(q, out)
}

/// Factor a nonzero integer; the sign is dropped.
pub fn factorize(n: &BigInt) -> Result<PrimeFactorization> {
    if n.is_zero() {
        return Err(domain("cannot factor 0"));
    }
    let mut m = n.magnitude().clone();
    if let Some(v) = m.to_u64() {
        let factors = factorize_u64(v)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        return Ok(PrimeFactorization { factors });
    }
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
    }
    let mut rest = Vec::new();
    split_large(m, &mut rest)?;
    rest.sort();
    for p in rest {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    factors.sort();
    Ok(PrimeFactorization { factors })
}

/// Machine-word factorization: trial division then rho on any large cofactor.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    for &p in small_primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        if mr_u64(n) {
            out.push((n, 1));
        } else {
            let mut big = Vec::new();
            // n is below 2^64 so primality is certified.
            split_large(BigUint::from(n), &mut big).expect("u64 primality is certified");
            big.sort();
            for p in big {
                let p = p.to_u64().unwrap();
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primorial() {
        let f = factorize(&BigInt::from(9699690)).unwrap();
        let ps: Vec<u64> = f.primes().map(|p| p.to_u64().unwrap()).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(f.is_squarefree());
    }

    #[test]
    fn trivial_cases() {
        assert!(factorize(&BigInt::from(1)).unwrap().factors.is_empty());
        let f = factorize(&BigInt::from(-12)).unwrap();
        assert_eq!(f.factors, vec![(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]);
        assert!(factorize(&BigInt::zero()).is_err());
    }

    #[test]
    fn rho_beyond_trial_range() {
        // two primes just above 10^6 and one above 10^9
        let p = BigUint::from(1_000_003u64);
        let q = BigUint::from(1_000_000_007u64);
        let n = BigInt::from(&p * &p * &q * BigUint::from(6u32));
        let f = factorize(&n).unwrap();
        assert_eq!(f.product(), n.magnitude().clone());
        assert_eq!(f.factors.len(), 4);
        let r = BigUint::from(999_999_000_001u64);
        let s = BigUint::from(1_000_000_000_039u64);
        let big = BigInt::from(&r * &s);
        let g = factorize(&big).unwrap();
        assert_eq!(g.factors, vec![(r, 1), (s, 1)]);
    }

    #[test]
    fn divisors_of_twelve() {
        let d: Vec<u64> = factorize(&BigInt::from(12))
            .unwrap()
            .divisors()
            .iter()
            .map(|x| x.to_u64().unwrap())
            .collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
    }
}
