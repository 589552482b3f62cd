//! Truncated Euler product for hR of L = F(sqrt rho).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::ideals::{decompose, BasePrime, Splitting};
use super::ring::{QuadRing, RelOrder, Rf};
use crate::arith::{kronecker_i64, legendre_u64, small_primes, sqrt_mod_prime};

/// Primes of F with norm up to this bound enter the product.
pub const EULER_BOUND: u64 = 1_000_000;

fn residue_mod(x: &Rf, p: u64, w: u64) -> u64 {
    let pb = BigInt::from(p);
    let a = x.a.mod_floor(&pb).to_u64().unwrap() as u128;
    let b = x.b.mod_floor(&pb).to_u64().unwrap() as u128;
    ((a + b * w as u128) % p as u128) as u64
}

fn chi_small(order: &RelOrder, q: BasePrime) -> i32 {
    let ps = decompose(order, &q);
    match ps[0].splitting {
        Splitting::Inert => -1,
        Splitting::Ramified(_) => 0,
        Splitting::Split(_) => 1,
    }
}

/// L(1, chi) for the quadratic character of L/F, truncated at EULER_BOUND.
pub fn l_value(order: &RelOrder, disc_f: u64, rho: &Rf) -> f64 {
    let ring: &QuadRing = &order.ring;
    let mut log_sum = 0.0f64;
    let norm_rho = ring.norm(rho);
    for &p in small_primes() {
        let p = p as u64;
        if p > EULER_BOUND {
            break;
        }
        let k = kronecker_i64(disc_f as i64, p as i64);
        let mut factor = |chi: i32, n: u64| {
            if chi != 0 {
                log_sum -= (1.0 - chi as f64 / n as f64).ln();
            }
        };
        if k == -1 {
            if p * p > EULER_BOUND {
                continue;
            }
            let chi = if p < 64 {
                chi_small(order, BasePrime { p, degree: 2, gen: Rf::int(p), root: None })
            } else {
                let nr = norm_rho.mod_floor(&BigInt::from(p)).to_u64().unwrap();
                legendre_u64(nr, p) as i32
            };
            factor(chi, p * p);
            continue;
        }
        let roots: Vec<u64> = if p < 64 {
            (0..p)
                .filter(|&w| {
                    let w = w as i128;
                    (w * w - ring.s as i128 * w - ring.r as i128).rem_euclid(p as i128) == 0
                })
                .collect()
        } else {
            let pi = p as i128;
            let dd = ((ring.s * ring.s + 4 * ring.r) as i128).rem_euclid(pi) as u64;
            let t = sqrt_mod_prime(dd, p).unwrap_or(0) as i128;
            let inv2 = (pi + 1) / 2;
            let mut v: Vec<u64> =
                [t, (pi - t) % pi].iter().map(|z| ((ring.s as i128 + z) * inv2).rem_euclid(pi) as u64).collect();
            v.sort();
            v.dedup();
            v
        };
        for w in roots {
            let chi = if p < 64 {
                chi_small(order, BasePrime { p, degree: 1, gen: Rf::int(p), root: Some(w) })
            } else {
                legendre_u64(residue_mod(rho, p, w), p) as i32
            };
            factor(chi, p);
        }
    }
    log_sum.exp()
}

/// Analytic value of h_L R_L.
pub fn analytic_hr(
    order: &RelOrder,
    disc_f: u64,
    reg_f: f64,
    rho: &Rf,
    abs_disc_l: f64,
    r1: u32,
    r2: u32,
    w: u64,
) -> f64 {
    let kappa_f = 2.0 * reg_f / (disc_f as f64).sqrt();
    let kappa_l = kappa_f * l_value(order, disc_f, rho);
    kappa_l * w as f64 * abs_disc_l.sqrt()
        / (2f64.powi(r1 as i32) * (2.0 * std::f64::consts::PI).powi(r2 as i32))
}
