use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;

use qmpolar::arith::{decompose_discriminant, factorize, is_squarefree_u64, kronecker, kronecker_i64, Discriminant};
use qmpolar::bqf::{analytic_h, class_number_imag, class_number_real, pell_unit};
use qmpolar::field::{BaseField, FieldIdeal};
use qmpolar::Error;

fn naive_is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn factorization_multiplies_back(n in 2u64..=1_000_000) {
        let f = factorize(&BigInt::from(n)).unwrap();
        let mut acc = BigUint::one();
        for (p, e) in &f.factors {
            prop_assert!(naive_is_prime(p.to_u64().unwrap()));
            for _ in 0..*e {
                acc *= p;
            }
        }
        prop_assert_eq!(acc, BigUint::from(n));
    }

    #[test]
    fn kronecker_is_multiplicative_on_top(a in -2000i64..2000, b in -2000i64..2000, n in 1i64..3000) {
        prop_assert_eq!(kronecker_i64(a * b, n), kronecker_i64(a, n) * kronecker_i64(b, n));
        let big = kronecker(&BigInt::from(a * b), &BigInt::from(n));
        prop_assert_eq!(big, kronecker_i64(a * b, n));
    }

    #[test]
    fn fundamental_part_is_a_fixed_point(v in -200_000i64..200_000) {
        prop_assume!(v != 0 && matches!(v.rem_euclid(4), 0 | 1));
        let d = decompose_discriminant(&BigInt::from(v)).unwrap();
        let again = decompose_discriminant(&d.fundamental_part).unwrap();
        prop_assert_eq!(&again.fundamental_part, &d.fundamental_part);
        prop_assert!(again.conductor.is_one());
        let f = BigInt::from(d.conductor.clone());
        prop_assert_eq!(&d.fundamental_part * &f * &f, BigInt::from(v));
    }
}

#[test]
fn reduced_forms_match_dirichlet_sum() {
    let mut checked = 0;
    for v in (-9_999i64..-4).filter(|v| v.rem_euclid(4) <= 1) {
        let d = Discriminant::new(v).unwrap();
        if !d.is_fundamental() {
            continue;
        }
        assert_eq!(class_number_imag(&d).unwrap(), analytic_h(&d).unwrap(), "disc {v}");
        checked += 1;
    }
    // 3041 fundamental discriminants in (-10^4, -4)
    assert_eq!(checked, 3041);
}

// h(f^2 D0) = h(D0) f prod (1 - (D0/p)/p) / [O*:O_f*], multiplied out in integers.
fn order_formula(d0: i64, f: i64, h0: u64) -> u64 {
    let mut num = h0 as i64 * f;
    let mut den = 1i64;
    let mut r = f;
    let mut p = 2;
    while r > 1 {
        if r % p == 0 {
            num *= p - kronecker_i64(d0, p) as i64;
            den *= p;
            while r % p == 0 {
                r /= p;
            }
        }
        p += 1;
    }
    if f > 1 {
        den *= match d0 {
            -3 => 3,
            -4 => 2,
            _ => 1,
        };
    }
    assert_eq!(num % den, 0);
    (num / den) as u64
}

#[test]
fn order_class_numbers_follow_the_conductor_formula() {
    for v in (-10_000i64..=-3).filter(|v| v.rem_euclid(4) <= 1) {
        let d = Discriminant::new(v).unwrap();
        if d.is_fundamental() {
            continue;
        }
        let d0 = d.fundamental_part.to_i64().unwrap();
        let f = d.conductor.to_i64().unwrap();
        let h0 = class_number_imag(&Discriminant::new(d0).unwrap()).unwrap();
        assert_eq!(class_number_imag(&d).unwrap(), order_formula(d0, f, h0), "disc {v}");
    }
}

#[test]
fn narrow_is_wide_or_double() {
    for v in (5i64..=10_000).filter(|v| v.rem_euclid(4) <= 1) {
        let d = Discriminant::new(v).unwrap();
        if d.is_square() {
            continue;
        }
        let r = class_number_real(&d).unwrap();
        assert!(r.h_narrow == r.h_wide || r.h_narrow == 2 * r.h_wide, "disc {v}");
        let u = pell_unit(&d).unwrap();
        let lhs = &u.x * &u.x - BigInt::from(v) * &u.y * &u.y;
        assert_eq!(lhs, BigInt::from(4 * u.norm_sign as i64), "disc {v}");
        assert!(u.y.is_positive());
        // narrow doubles exactly when the unit has norm +1
        assert_eq!(r.h_narrow == 2 * r.h_wide, u.norm_sign == 1, "disc {v}");
    }
}

#[test]
fn frozen_real_class_numbers() {
    // h(Q(sqrt m)) from tables: 10 -> 2, 15 -> 2, 79 -> 3, 223 -> 3, 226 -> 8
    for (disc, h) in [(40i64, 2u64), (60, 2), (316, 3), (892, 3), (904, 8), (8, 1), (5, 1)] {
        let r = class_number_real(&Discriminant::new(disc).unwrap()).unwrap();
        assert_eq!(r.h_wide, h, "disc {disc}");
    }
}

fn squarefree_ms() -> impl Iterator<Item = u64> {
    (2u64..=150).filter(|&m| is_squarefree_u64(m))
}

#[test]
fn narrow_class_number_ratio() {
    for m in squarefree_ms() {
        let f = BaseField::quadratic(m).unwrap();
        let ratio = f.h_plus / f.h;
        assert!(f.h_plus % f.h == 0 && (ratio == 1 || ratio == 2), "m = {m}");
        assert_eq!(ratio == 1, f.unit_norm() == -1, "m = {m}");
        assert_eq!(f.units_mod_squares().len(), 1 << f.degree, "m = {m}");
    }
    assert_eq!(BaseField::rational().units_mod_squares().len(), 2);
}

#[test]
fn totally_positive_generators_are_positive() {
    for m in squarefree_ms() {
        let f = BaseField::quadratic(m).unwrap();
        if f.restricted_support {
            continue;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            for prime in f.primes_over(p).unwrap() {
                let ideal = FieldIdeal { generator: None, ..FieldIdeal::principal(&f, prime.generator.clone()) };
                let found = match f.totally_positive_generator(&ideal) {
                    Err(Error::SearchExhausted(_)) => continue,
                    r => r.unwrap(),
                };
                let Some(g) = found else {
                    // no totally positive generator forces a norm +1 unit
                    assert_eq!(f.unit_norm(), 1, "m = {m}, p = {p}");
                    continue;
                };
                assert!((0..2).all(|s| g.to_f64_at(s) > 0.0) && g.is_totally_positive());
                assert_eq!(g.norm().to_integer().abs(), BigInt::from(ideal.norm.clone()));
            }
        }
    }
}
