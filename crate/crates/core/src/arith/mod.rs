//! Integer substrate: factorization, Kronecker symbols, discriminants.

mod disc;
mod factor;
mod kronecker;

pub use disc::{decompose_discriminant, Discriminant};
pub use factor::{factorize, factorize_u64, is_prime, small_primes, PrimeFactorization};
pub use kronecker::{kronecker, kronecker_i64, legendre_u64, sqrt_mod_prime};

/// Squarefree test on a machine integer.
pub fn is_squarefree_u64(n: u64) -> bool {
    n != 0 && factorize_u64(n).iter().all(|&(_, e)| e == 1)
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}
