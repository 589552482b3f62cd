use num_bigint::BigInt;
use qmpolar::bqf::{class_number_imag, class_number_real};
use qmpolar::cm::{conductor, order_class_number, order_lattice, unit_norm_exponents, ExtensionData};
use qmpolar::field::{parse_elem, BaseField, FieldElem};
use qmpolar::numfield::ring::{Elt, Rf};

fn q() -> BaseField {
    BaseField::rational()
}

fn int(d: i64) -> FieldElem {
    FieldElem::from_int(1, d)
}

#[test]
fn rational_conductors() {
    let e = conductor(&q(), &int(15)).unwrap();
    assert_eq!(e.conductor_norm, 2);
    let lat = order_lattice(&e).unwrap();
    assert_eq!(lat.len(), 2);
    assert_eq!(lat.iter().map(|o| o.h_s).collect::<Vec<_>>(), vec![2, 2]);
    let e = conductor(&q(), &int(6)).unwrap();
    assert_eq!(e.conductor_norm, 1);
    assert_eq!(order_lattice(&e).unwrap().len(), 1);
    assert!(conductor(&q(), &int(-4)).is_err());
    assert!(conductor(&q(), &int(0)).is_err());
}

#[test]
fn rational_order_class_numbers() {
    let e = conductor(&q(), &int(15)).unwrap();
    assert_eq!(order_class_number(&e, &int(2)).unwrap(), 2);
    assert_eq!(order_class_number(&e, &int(1)).unwrap(), e.h_l);
    let e = conductor(&q(), &int(6)).unwrap();
    assert_eq!(order_class_number(&e, &int(1)).unwrap(), 2);
    // -3 and -4: the unit index absorbs the extra roots of unity
    let e = conductor(&q(), &int(3)).unwrap();
    assert_eq!(order_lattice(&e).unwrap()[1].unit_index, 3);
    assert!(order_class_number(&e, &int(3)).is_err());
}

#[test]
fn rational_unit_exponents() {
    let e = conductor(&q(), &int(6)).unwrap();
    assert_eq!(unit_norm_exponents(&e, &int(1)).unwrap(), (1, 0));
    // Q(sqrt 6): 5 + 2 sqrt 6 has norm +1
    let e = conductor(&q(), &int(-6)).unwrap();
    assert_eq!(unit_norm_exponents(&e, &int(1)).unwrap(), (1, 0));
    // Q(sqrt 2): 1 + sqrt 2 has norm -1
    let e = conductor(&q(), &int(-2)).unwrap();
    assert_eq!(unit_norm_exponents(&e, &int(1)).unwrap(), (0, 0));
    // Q(sqrt 5), order of conductor 2: unit index 3, (2 + sqrt 5)^... norm stays -1
    let e = conductor(&q(), &int(-5)).unwrap();
    let lat = order_lattice(&e).unwrap();
    assert_eq!(lat.iter().map(|o| (o.unit_index, o.e_s)).collect::<Vec<_>>(), vec![(1, 0), (3, 0)]);
}

#[test]
fn rational_sweep_matches_reduced_forms() {
    for d in 1..=10_000i64 {
        for delta in [d, -d] {
            let Ok(e) = conductor(&q(), &int(delta)) else {
                continue;
            };
            for o in order_lattice(&e).unwrap() {
                let disc = o.discriminant.as_ref().unwrap();
                let direct = if disc.is_negative() {
                    class_number_imag(disc).unwrap()
                } else {
                    class_number_real(disc).unwrap().h_wide
                };
                assert_eq!(o.h_s, direct, "delta {delta}, disc {}", disc.value);
                assert!(o.e_s <= 1 && o.e_s_plus <= o.e_s);
            }
        }
    }
}

#[test]
fn sqrt2_over_seven() {
    let f = BaseField::quadratic(2).unwrap();
    let e = conductor(&f, &parse_elem(2, "7").unwrap()).unwrap();
    assert_eq!(e.conductor_norm, 4);
    assert_eq!(e.rel_disc_norm, BigInt::from(49));
    assert_eq!(e.abs_disc_l, BigInt::from(3136));
    assert!(e.totally_imaginary);
    let lat = order_lattice(&e).unwrap();
    let got: Vec<_> = lat.iter().map(|o| (o.conductor_divisor_norm, o.h_s, o.e_s, o.e_s_plus)).collect();
    // h(O_L) = 2 from PARI; orders by the unit quotient formula
    assert_eq!(got, vec![(1, 2, 2, 0), (2, 2, 2, 0), (4, 4, 2, 0)]);
    assert!(lat.iter().all(|o| o.ample == Some(true)));
}

#[test]
fn sqrt2_other_units() {
    let f = BaseField::quadratic(2).unwrap();
    let cases = [("-7", 12544, 1, vec![1, 1]), ("7+7*sqrt2", 50176, 2, vec![2]), ("-7-7*sqrt2", 50176, 2, vec![2])];
    for (delta, disc, h, hs) in cases {
        let e = conductor(&f, &parse_elem(2, delta).unwrap()).unwrap();
        assert_eq!(e.abs_disc_l, BigInt::from(disc), "{delta}");
        assert_eq!(e.h_l, h, "{delta}");
        assert!(!e.totally_imaginary);
        let lat = order_lattice(&e).unwrap();
        assert_eq!(lat.iter().map(|o| o.h_s).collect::<Vec<_>>(), hs, "{delta}");
        assert!(lat.iter().all(|o| o.e_s <= 2));
    }
}

#[test]
fn divisor_lattice_is_inclusion_lattice() {
    let f = BaseField::quadratic(2).unwrap();
    let e = conductor(&f, &parse_elem(2, "7").unwrap()).unwrap();
    let ExtensionData::Quartic { field, .. } = &e.data else { unreachable!() };
    let ring = &field.order.ring;
    let lat = order_lattice(&e).unwrap();
    let gens: Vec<Rf> = lat.iter().map(|o| ring.from_elem(&o.conductor_divisor).unwrap()).collect();
    for fs in &gens {
        for ft in &gens {
            // S_t is spanned over R_F by 1 and ft * theta
            let theta_t = Elt { u: Rf::zero(), v: ft.clone() };
            let contained = field.order.in_suborder(&theta_t, fs);
            assert_eq!(contained, ring.divides(fs, ft));
        }
    }
}

#[test]
fn quadratic_base_needs_class_number_one() {
    let f = BaseField::quadratic(10).unwrap();
    assert!(conductor(&f, &parse_elem(10, "3").unwrap()).is_err());
}
