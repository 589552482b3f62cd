//! Quadratic extensions L = F(sqrt(-delta)) of the base field and the orders
//! S between R_F[sqrt(-delta)] and O_L: conductor, class numbers h(S) and
//! the unit norm exponents e_S, e_S^+.

mod memo;
mod quotient;

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Discriminant;
use crate::bqf::pell_unit;
use crate::error::{domain, inconsistent, Result};
use crate::field::{BaseField, FieldElem};
use crate::numfield::ring::{Elt, QuadRing, Rf};
use crate::numfield::{conductor_rule, ClassGroup, QuarticField};

pub use memo::{h_imag, h_real, quartic_class_group, Memo};
pub use quotient::{unit_image, UnitImage};

/// Per-base data behind an extension.
#[derive(Debug, Clone)]
pub enum ExtensionData {
    /// L quadratic over Q: discriminant of O_L and the conductor of Z[sqrt(-delta)]
    Rational { fundamental: Discriminant, conductor: u64 },
    /// L quartic over Q
    Quartic { field: QuarticField, class_group: Arc<ClassGroup> },
}

/// L = F(sqrt(-delta)) with its maximal order computed.
#[derive(Debug, Clone)]
pub struct CMExtension {
    pub base: BaseField,
    pub delta: FieldElem,
    pub abs_disc_l: BigInt,
    pub rel_disc_norm: BigInt,
    pub conductor: FieldElem,
    pub conductor_norm: u64,
    pub h_l: u64,
    /// every place of L complex (true exactly when delta is totally positive)
    pub totally_imaginary: bool,
    pub data: ExtensionData,
}

/// An order S = R_F + f O_L for an ideal f dividing the conductor.
#[derive(Debug, Clone, PartialEq)]
pub struct CMOrderDescriptor {
    pub conductor_divisor: FieldElem,
    pub conductor_divisor_norm: u64,
    /// discriminant of S when F = Q
    pub discriminant: Option<Discriminant>,
    pub h_s: u64,
    /// [O_L^* : S^*]
    pub unit_index: u64,
    pub e_s: u32,
    pub e_s_plus: u32,
    /// None when the signature space of R_F^* is not full
    pub ample: Option<bool>,
}

/// Build L = F(sqrt(-delta)), its class number and the conductor of
/// R_F[sqrt(-delta)].
pub fn conductor(base: &BaseField, delta: &FieldElem) -> Result<CMExtension> {
    if delta.is_zero() {
        return Err(domain("delta must be nonzero"));
    }
    if base.is_rational() {
        rational_extension(base, delta)
    } else {
        quartic_extension(base, delta)
    }
}

fn rational_extension(base: &BaseField, delta: &FieldElem) -> Result<CMExtension> {
    let d = delta.as_integer().ok_or_else(|| domain(format!("delta = {delta} is not an integer")))?;
    let r = -&d;
    let four_r: BigInt = &r * 4;
    let ring_disc = Discriminant::new(four_r.clone())?;
    if ring_disc.is_square() {
        return Err(domain(format!("-delta = {r} is a square")));
    }
    let fundamental = Discriminant::new(ring_disc.fundamental_part.clone())?;
    let f = ring_disc
        .conductor
        .to_u64()
        .ok_or_else(|| domain("conductor out of range"))?;
    if r.is_odd() {
        let k = (&r - 1u32).trailing_zeros().map(|k| k as u32);
        let rule = conductor_rule(k, 1)?;
        if rule != f.trailing_zeros() {
            return Err(inconsistent(format!(
                "2-adic conductor exponent {} of Z[sqrt({r})] disagrees with the k/e rule {rule}",
                f.trailing_zeros()
            )));
        }
    }
    let h_l = if fundamental.is_negative() { h_imag(&fundamental)? } else { h_real(&fundamental)?.h_wide };
    let abs_disc = fundamental.value.abs();
    if BigInt::from(f * f) * &abs_disc != four_r.abs() {
        return Err(inconsistent("conductor and discriminant do not match 4 delta"));
    }
    Ok(CMExtension {
        base: base.clone(),
        delta: delta.clone(),
        abs_disc_l: abs_disc.clone(),
        rel_disc_norm: abs_disc,
        conductor: FieldElem::from_int(1, f),
        conductor_norm: f,
        h_l,
        totally_imaginary: r.is_negative(),
        data: ExtensionData::Rational { fundamental, conductor: f },
    })
}

fn quartic_extension(base: &BaseField, delta: &FieldElem) -> Result<CMExtension> {
    base.require_class_number_one()?;
    let m = base.m();
    let (a, b) = delta
        .integral_coords()
        .ok_or_else(|| domain(format!("delta = {delta} is not integral")))?;
    let rho = Rf::new(-a, -b);
    let (ua, ub) = base.unit().and_then(|e| e.integral_coords()).expect("real quadratic unit");
    let qf = QuarticField::new(m, base.disc, Rf::new(ua, ub), rho)?;
    qf.check_desk_scale()?;
    let class_group = quartic_class_group(&qf)?;
    let ring = &qf.order.ring;
    let conductor_norm = ring.norm(&qf.conductor).abs();
    let delta_norm = delta.norm().to_integer().abs();
    if &conductor_norm * &conductor_norm * &qf.rel_disc_norm != delta_norm * 16 {
        return Err(inconsistent("N(f)^2 N(d_L/F) differs from N(4 delta)"));
    }
    Ok(CMExtension {
        base: base.clone(),
        delta: delta.clone(),
        abs_disc_l: qf.abs_disc.clone(),
        rel_disc_norm: qf.rel_disc_norm.clone(),
        conductor: ring.to_elem(&qf.conductor),
        conductor_norm: conductor_norm.to_u64().expect("conductor divides 2"),
        h_l: class_group.h,
        totally_imaginary: qf.is_cm(),
        data: ExtensionData::Quartic { field: qf, class_group },
    })
}

/// Class number and discriminant of the maximal order of L.
pub fn classgroup_small(ext: &CMExtension) -> (u64, BigInt) {
    (ext.h_l, ext.abs_disc_l.clone())
}

// Divisors of the conductor as ring elements (Rf over a quadratic base,
// integers over Q).
enum Divisor {
    Int(u64),
    Quad(Rf),
}

fn divisors(ext: &CMExtension) -> Vec<Divisor> {
    match &ext.data {
        ExtensionData::Rational { conductor, .. } => (1..=*conductor)
            .filter(|d| conductor % d == 0)
            .map(Divisor::Int)
            .collect(),
        ExtensionData::Quartic { field, .. } => {
            let ring = &field.order.ring;
            let mut out = vec![Rf::one()];
            for t in &field.two_adic {
                let mut next = Vec::new();
                for d in &out {
                    let mut cur = d.clone();
                    for _ in 0..=t.exponent {
                        next.push(cur.clone());
                        cur = ring.mul(&cur, &t.prime_gen);
                    }
                }
                out = next;
            }
            out.sort_by_key(|d| ring.norm(d).abs());
            out.into_iter().map(Divisor::Quad).collect()
        }
    }
}

// Counts behind the order class number formula plus the norm classes of S^*.
struct UnitData {
    units_l: u64,
    units_f: u64,
    image: UnitImage,
    /// class in R_F^*/R_F^*2 of the norm of each unit generator, as bits
    norm_classes: Vec<u8>,
    /// classes of totally positive units modulo squares
    tp_classes: Vec<u8>,
    degree: u32,
}

impl UnitData {
    fn norm_image(&self) -> HashSet<u8> {
        self.image
            .kernel_parities
            .iter()
            .map(|par| {
                par.iter()
                    .zip(&self.norm_classes)
                    .filter(|(p, _)| **p == 1)
                    .fold(0u8, |acc, (_, c)| acc ^ c)
            })
            .collect()
    }

    fn exponents(&self) -> (u32, u32) {
        let img = self.norm_image();
        let e_s = self.degree - img.len().trailing_zeros();
        let meet = self.tp_classes.iter().filter(|c| img.contains(c)).count();
        let e_plus = (self.tp_classes.len() / meet).trailing_zeros();
        (e_s, e_plus)
    }
}

// O_L = Z[tau], tau^2 = d tau - n over Q.
struct ImagRing {
    d: BigInt,
    n: BigInt,
}

impl ImagRing {
    fn new(d: &BigInt) -> Self {
        ImagRing { d: d.clone(), n: (d * d - d) / 4 }
    }

    fn mul(&self, x: &(BigInt, BigInt), y: &(BigInt, BigInt)) -> (BigInt, BigInt) {
        let bd = &x.1 * &y.1;
        (&x.0 * &y.0 - &bd * &self.n, &x.0 * &y.1 + &x.1 * &y.0 + &bd * &self.d)
    }

    fn norm(&self, x: &(BigInt, BigInt)) -> BigInt {
        &x.0 * &x.0 + &self.d * &x.0 * &x.1 + &self.n * &x.1 * &x.1
    }
}

fn rational_units(fundamental: &Discriminant, f: u64) -> Result<UnitData> {
    let d = &fundamental.value;
    let ring = ImagRing::new(d);
    let mut gens: Vec<(BigInt, BigInt)> = Vec::new();
    if d.is_negative() {
        let v = d.to_i64().unwrap_or(i64::MIN);
        gens.push(match v {
            -3 | -4 => (BigInt::from(2), BigInt::one()),
            _ => (BigInt::from(-1), BigInt::zero()),
        });
    } else {
        gens.push((BigInt::from(-1), BigInt::zero()));
        let pu = pell_unit(fundamental)?;
        // (x + y sqrt d)/2 = (x - y d)/2 + y tau
        gens.push(((&pu.x - &pu.y * d) / 2, pu.y.clone()));
    }
    let fb = BigInt::from(f);
    let coprime = |n: &BigInt| n.gcd(&fb).is_one();
    let red = |x: &(BigInt, BigInt)| (x.0.mod_floor(&fb).to_u64().unwrap(), x.1.mod_floor(&fb).to_u64().unwrap());
    let units_f_list: Vec<u64> = (0..f).filter(|r| coprime(&BigInt::from(*r))).collect();
    let canon = |x: (u64, u64)| {
        units_f_list
            .iter()
            .map(|r| ((x.0 * r) % f, (x.1 * r) % f))
            .min()
            .unwrap()
    };
    let mut units_l = 0;
    for a in 0..f {
        for b in 0..f {
            if coprime(&ring.norm(&(BigInt::from(a), BigInt::from(b)))) {
                units_l += 1;
            }
        }
    }
    let imgs: Vec<(u64, u64)> = gens.iter().map(|g| canon(red(g))).collect();
    let one = canon((1 % f, 0));
    let mul = |x: &(u64, u64), y: &(u64, u64)| {
        let p = ring.mul(&(BigInt::from(x.0), BigInt::from(x.1)), &(BigInt::from(y.0), BigInt::from(y.1)));
        canon(red(&p))
    };
    let image = unit_image(&imgs, &one, mul);
    let norm_classes = gens.iter().map(|g| u8::from(ring.norm(g).is_negative())).collect();
    Ok(UnitData {
        units_l,
        units_f: units_f_list.len() as u64,
        image,
        norm_classes,
        tp_classes: vec![0],
        degree: 1,
    })
}

/// Class of a unit of R_F in R_F^*/R_F^*2: bit 0 the sign, bit 1 the parity
/// of the exponent of the fundamental unit.
pub fn unit_class(ring: &QuadRing, eps: &Rf, nu: &Rf) -> Result<u8> {
    let k = (ring.emb(nu, 0).abs().ln() / ring.emb(eps, 0).abs().ln()).round() as i64;
    let eps_inv = {
        let c = ring.conj(eps);
        if ring.norm(eps).is_negative() { ring.neg(&c) } else { c }
    };
    let base = if k < 0 { &eps_inv } else { eps };
    let p = ring.pow(base, k.unsigned_abs() as u32);
    let s = ring.div_exact(nu, &p).ok_or_else(|| inconsistent(format!("{nu:?} is not a unit")))?;
    let sign = if s.is_one() {
        0
    } else if s == Rf::int(-1) {
        1
    } else {
        return Err(inconsistent(format!("{nu:?} is not +-eps^{k}")));
    };
    Ok(sign | ((k.rem_euclid(2) as u8) << 1))
}

fn quartic_units(ext: &CMExtension, qf: &QuarticField, cg: &ClassGroup, f: &Rf) -> Result<UnitData> {
    let ring = &qf.order.ring;
    let order = &qf.order;
    let reps = ring.residues(f);
    let primes: Vec<Rf> = qf
        .two_adic
        .iter()
        .map(|t| t.prime_gen.clone())
        .filter(|g| ring.divides(g, f))
        .collect();
    let unit_f = |r: &Rf| !primes.iter().any(|g| ring.divides(g, r));
    let unit_l = |x: &Elt| {
        let n = order.rel_norm(x);
        !primes.iter().any(|g| ring.divides(g, &n))
    };
    let units_f_list: Vec<&Rf> = reps.iter().filter(|r| unit_f(r)).collect();
    let idx = |x: &Rf| reps.iter().position(|c| ring.congruent(x, c, f)).unwrap();
    let class = |x: &Elt| (idx(&x.u), idx(&x.v));
    let canon = |x: &Elt| {
        units_f_list
            .iter()
            .map(|r| class(&Elt { u: ring.mul(&x.u, r), v: ring.mul(&x.v, r) }))
            .min()
            .unwrap()
    };
    let mut units_l = 0;
    for u in &reps {
        for v in &reps {
            if unit_l(&Elt { u: u.clone(), v: v.clone() }) {
                units_l += 1;
            }
        }
    }
    let mut gens = vec![cg.zeta.clone()];
    gens.extend(cg.fundamental_units.iter().cloned());
    let imgs: Vec<(usize, usize)> = gens.iter().map(&canon).collect();
    let one = canon(&Elt::one());
    let mul = |x: &(usize, usize), y: &(usize, usize)| {
        let ex = Elt { u: reps[x.0].clone(), v: reps[x.1].clone() };
        let ey = Elt { u: reps[y.0].clone(), v: reps[y.1].clone() };
        canon(&order.mul(&ex, &ey))
    };
    let image = unit_image(&imgs, &one, mul);
    let eps = &qf.unit_f;
    let norm_classes = gens
        .iter()
        .map(|g| unit_class(ring, eps, &order.rel_norm(g)))
        .collect::<Result<Vec<_>>>()?;
    let tp_classes = ext
        .base
        .tp_units_mod_squares()
        .iter()
        .map(|u| unit_class(ring, eps, &ring.from_elem(u).expect("integral unit")))
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitData {
        units_l,
        units_f: units_f_list.len() as u64,
        image,
        norm_classes,
        tp_classes,
        degree: 2,
    })
}

fn unit_data(ext: &CMExtension, div: &Divisor) -> Result<UnitData> {
    match (&ext.data, div) {
        (ExtensionData::Rational { fundamental, .. }, Divisor::Int(f)) => rational_units(fundamental, *f),
        (ExtensionData::Quartic { field, class_group }, Divisor::Quad(f)) => {
            quartic_units(ext, field, class_group, f)
        }
        _ => unreachable!("divisor kind follows the base field"),
    }
}

fn formula_h(ext: &CMExtension, u: &UnitData) -> Result<u64> {
    let num = ext.h_l * u.units_l;
    let den = u.units_f * u.image.index;
    if num % den != 0 {
        return Err(inconsistent(format!(
            "h(S) = {} * {} / ({} * {}) is not an integer",
            ext.h_l, u.units_l, u.units_f, u.image.index
        )));
    }
    Ok(num / den)
}

fn describe(ext: &CMExtension, div: &Divisor) -> Result<CMOrderDescriptor> {
    let u = unit_data(ext, div)?;
    let h_s = formula_h(ext, &u)?;
    let (e_s, e_s_plus) = u.exponents();
    let (elem, norm, disc) = match (div, &ext.data) {
        (Divisor::Int(f), ExtensionData::Rational { fundamental, .. }) => {
            let disc = Discriminant::new(&fundamental.value * BigInt::from(f * f))?;
            // independent route: reduced forms of the order discriminant
            let direct = if disc.is_negative() { h_imag(&disc)? } else { h_real(&disc)?.h_wide };
            if direct != h_s {
                return Err(inconsistent(format!(
                    "order class number {h_s} from the unit quotient formula differs from {direct} by reduced forms at {}",
                    disc.value
                )));
            }
            (FieldElem::from_int(1, *f), *f, Some(disc))
        }
        (Divisor::Quad(f), ExtensionData::Quartic { field, .. }) => {
            let ring = &field.order.ring;
            (ring.to_elem(f), ring.norm(f).abs().to_u64().expect("small"), None)
        }
        _ => unreachable!("divisor kind follows the base field"),
    };
    let ample = (ext.base.sigma_space_dim == ext.base.degree).then_some(true);
    Ok(CMOrderDescriptor {
        conductor_divisor: elem,
        conductor_divisor_norm: norm,
        discriminant: disc,
        h_s,
        unit_index: u.image.index,
        e_s,
        e_s_plus,
        ample,
    })
}

/// One descriptor per divisor of the conductor, maximal order first.
pub fn order_lattice(ext: &CMExtension) -> Result<Vec<CMOrderDescriptor>> {
    divisors(ext).iter().map(|d| describe(ext, d)).collect()
}

fn find_divisor(ext: &CMExtension, f: &FieldElem) -> Result<Divisor> {
    let hit = divisors(ext).into_iter().find(|d| match d {
        Divisor::Int(n) => f.as_integer() == Some(BigInt::from(*n)),
        Divisor::Quad(g) => match &ext.data {
            ExtensionData::Quartic { field, .. } => {
                let ring = &field.order.ring;
                ring.from_elem(f).is_some_and(|x| ring.divides(&x, g) && ring.divides(g, &x))
            }
            _ => false,
        },
    });
    hit.ok_or_else(|| domain(format!("{f} does not divide the conductor {}", ext.conductor)))
}

/// h(S) for S = R_F + f O_L, by the unit quotient formula.
pub fn order_class_number(ext: &CMExtension, f: &FieldElem) -> Result<u64> {
    let div = find_divisor(ext, f)?;
    formula_h(ext, &unit_data(ext, &div)?)
}

/// (e_S, e_S^+) for S = R_F + f O_L.
pub fn unit_norm_exponents(ext: &CMExtension, f: &FieldElem) -> Result<(u32, u32)> {
    let div = find_divisor(ext, f)?;
    Ok(unit_data(ext, &div)?.exponents())
}
