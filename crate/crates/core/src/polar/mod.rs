//! Principal line bundles and polarizations on an abelian variety with
//! quaternionic multiplication: existence criteria and the counts pi, pi_0
//! and pi_i, plus the Pollack and Eichler embedding-class counts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{factorize, Discriminant};
use crate::bqf::pell_norm_sign;
use crate::cm::{conductor, h_imag, h_real, order_lattice, CMExtension, CMOrderDescriptor};
use crate::error::{domain, inconsistent, Error, Result};
use crate::field::{BaseField, FieldElem, FieldIdeal};
use crate::quat::SignatureVector;

/// Arithmetic data of A: base field, discriminant generator, level, n(I)
/// times the different, and the signs of Im(tau_i).
#[derive(Debug, Clone)]
pub struct QMContext {
    pub base: BaseField,
    /// generator of D, replaced by a totally positive associate when one exists
    pub disc_generator: FieldElem,
    pub disc_totally_positive: bool,
    pub level: u64,
    pub ideal_norm_times_different: FieldIdeal,
    pub tau_signs: SignatureVector,
    /// (different, D_O) = 1
    pub coprimality_ok: bool,
}

impl QMContext {
    /// Validate D (squarefree, an even number of prime factors), the level
    /// and n(I).
    pub fn new(base: &BaseField, disc: FieldElem, level: u64, ideal_norm: FieldElem, tau_signs: SignatureVector) -> Result<Self> {
        if tau_signs.0.len() != base.degree || tau_signs.0.iter().any(|s| s.abs() != 1) {
            return Err(domain(format!("need {} signs of Im(tau)", base.degree)));
        }
        if level == 0 {
            return Err(domain("level must be positive"));
        }
        if disc.is_zero() || !disc.is_integral() || ideal_norm.is_zero() {
            return Err(domain("D and n(I) must be nonzero and integral"));
        }
        // factoring in F needs generators of its primes, so h(F) > 1 is left
        // to fail in the principality test
        let primes = if base.restricted_support { 0 } else { prime_count(base, &disc)? };
        if primes % 2 != 0 {
            return Err(domain(format!(
                "D = {disc} has {primes} prime factors; a totally indefinite algebra ramifies at an even number"
            )));
        }
        let level_elem = FieldElem::from_int(base.m(), level);
        let d_o = &disc * &level_elem;
        if level > 1 && !base.restricted_support {
            prime_count(base, &d_o)?;
        }
        let tp = base.totally_positive_associate(&disc);
        let disc_totally_positive = tp.is_some();
        let disc_generator = tp.unwrap_or(disc);
        let different = base.different_generator();
        let n_theta = &ideal_norm * &different;
        let d_norm = d_o.norm().to_integer().abs();
        let coprimality_ok = d_norm.gcd(&BigInt::from(base.disc)).is_one();
        Ok(QMContext {
            ideal_norm_times_different: FieldIdeal::principal(base, n_theta),
            base: base.clone(),
            disc_generator,
            disc_totally_positive,
            level,
            tau_signs,
            coprimality_ok,
        })
    }

    /// Surface context over Q with n(I) = 1 and Im(tau) > 0.
    pub fn surface(disc: u64) -> Result<Self> {
        Self::new(&BaseField::rational(), FieldElem::from_int(1, disc), 1, FieldElem::one(1), SignatureVector(vec![1]))
    }

    /// Maximal-order context over Q(sqrt m) with n(I) = 1 and all Im(tau) > 0.
    pub fn over(base: &BaseField, disc: FieldElem) -> Result<Self> {
        let m = base.m();
        Self::new(base, disc, 1, FieldElem::one(m), SignatureVector(vec![1; base.degree]))
    }

    pub fn dimension(&self) -> usize {
        2 * self.base.degree
    }

    pub fn disc_order(&self) -> FieldElem {
        &self.disc_generator * &FieldElem::from_int(self.base.m(), self.level)
    }
}

// Number of prime ideals dividing x, each to the first power.
fn prime_count(base: &BaseField, x: &FieldElem) -> Result<usize> {
    if base.is_rational() {
        let n = x.as_integer().ok_or_else(|| domain("expected an integer"))?;
        let f = factorize(&n)?;
        if !f.is_squarefree() {
            return Err(domain(format!("{n} is not squarefree")));
        }
        return Ok(f.omega());
    }
    let fac = base.factor_element(x)?;
    if fac.iter().any(|(_, e)| *e > 1) {
        return Err(domain(format!("{x} is not squarefree")));
    }
    Ok(fac.len())
}

/// Is there a principal line bundle on A?
pub fn principal_existence(ctx: &QMContext) -> Result<bool> {
    // with h(F) = 1 every ideal of F is principal, including D_O a^2 and
    // n(I) theta a^-1 for every a dividing the different
    ctx.base.require_class_number_one()?;
    let d_o = FieldIdeal::principal(&ctx.base, ctx.disc_order());
    let ok = d_o.generator.is_some() && ctx.ideal_norm_times_different.generator.is_some();
    Ok(ok)
}

/// Is A principally polarizable?
pub fn polarizable(ctx: &QMContext) -> Result<bool> {
    if !principal_existence(ctx)? {
        return Ok(false);
    }
    if !ctx.disc_totally_positive {
        return Ok(false);
    }
    if ctx.base.sigma_space_dim != ctx.base.degree {
        return Err(Error::Undecidable(format!(
            "h+({0}) = {1} differs from h({0}) = {2}; the admissible signatures are not determined",
            ctx.base.name(),
            ctx.base.h_plus,
            ctx.base.h
        )));
    }
    Ok(true)
}

/// One unit branch u of a count: delta = u D and the orders over it.
#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub unit: String,
    pub delta: String,
    /// sign of delta at each real place
    pub delta_signs: Vec<i8>,
    pub abs_disc_l: String,
    pub h_l: u64,
    pub orders: Vec<OrderTerm>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderTerm {
    pub conductor: String,
    pub conductor_norm: u64,
    pub h_s: u64,
    pub e_s: u32,
    pub e_s_plus: u32,
}

/// A count with its per-order breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct Count {
    pub value: u64,
    pub branches: Vec<Branch>,
}

fn branch(ctx: &QMContext, u: &FieldElem) -> Result<(Branch, CMExtension, Vec<CMOrderDescriptor>)> {
    let delta = u * &ctx.disc_generator;
    let ext = conductor(&ctx.base, &delta)?;
    let lat = order_lattice(&ext)?;
    let b = Branch {
        unit: u.to_string(),
        delta: delta.to_string(),
        delta_signs: ctx.base.signs(&delta),
        abs_disc_l: ext.abs_disc_l.to_string(),
        h_l: ext.h_l,
        orders: lat
            .iter()
            .map(|o| OrderTerm {
                conductor: o.conductor_divisor.to_string(),
                conductor_norm: o.conductor_divisor_norm,
                h_s: o.h_s,
                e_s: o.e_s,
                e_s_plus: o.e_s_plus,
            })
            .collect(),
    };
    Ok((b, ext, lat))
}

fn exact_div(num: u64, den: u64, what: &str) -> Result<u64> {
    if num % den != 0 {
        return Err(inconsistent(format!("{what}: {num}/{den} is not an integer")));
    }
    Ok(num / den)
}

fn require_counting(ctx: &QMContext) -> Result<()> {
    if ctx.level != 1 {
        return Err(Error::Unsupported("counting formulas need the maximal order (level 1)".into()));
    }
    if !ctx.coprimality_ok {
        return Err(Error::Unsupported("counting formulas need (different, D) = 1".into()));
    }
    Ok(())
}

/// pi_0(A) = 1/(2 h+(F)) sum over totally positive u and ample S of 2^(e_S^+) h(S).
pub fn pi_zero_detailed(ctx: &QMContext) -> Result<Count> {
    require_counting(ctx)?;
    if !polarizable(ctx)? {
        return Ok(Count { value: 0, branches: Vec::new() });
    }
    let mut sum = 0u64;
    let mut branches = Vec::new();
    for u in ctx.base.tp_units_mod_squares() {
        let (b, _, lat) = branch(ctx, &u)?;
        for o in &lat {
            match o.ample {
                Some(true) => sum += o.h_s << o.e_s_plus,
                Some(false) => {}
                None => return Err(Error::Undecidable("ampleness of an order is not determined".into())),
            }
        }
        branches.push(b);
    }
    let value = exact_div(sum, 2 * ctx.base.h_plus, "pi_0")?;
    Ok(Count { value, branches })
}

pub fn pi_zero(ctx: &QMContext) -> Result<u64> {
    Ok(pi_zero_detailed(ctx)?.value)
}

// Per-unit sums T_u = 1/(2 h(F)) sum_S 2^(e_S) h(S), kept as numerators.
fn unit_sums(ctx: &QMContext) -> Result<Vec<(Branch, u64)>> {
    require_counting(ctx)?;
    if !principal_existence(ctx)? {
        return Ok(Vec::new());
    }
    ctx.base
        .units_mod_squares()
        .iter()
        .map(|u| {
            let (b, _, lat) = branch(ctx, u)?;
            let s = lat.iter().map(|o| o.h_s << o.e_s).sum();
            Ok((b, s))
        })
        .collect()
}

/// pi(A) = 1/(2 h(F)) sum over u in R_F^*/R_F^*2 and S of 2^(e_S) h(S).
pub fn pi_total_detailed(ctx: &QMContext) -> Result<Count> {
    let sums = unit_sums(ctx)?;
    let total: u64 = sums.iter().map(|(_, s)| s).sum();
    let value = exact_div(total, 2 * ctx.base.h, "pi")?;
    Ok(Count { value, branches: sums.into_iter().map(|(b, _)| b).collect() })
}

pub fn pi_total(ctx: &QMContext) -> Result<u64> {
    Ok(pi_total_detailed(ctx)?.value)
}

fn surface_disc(d: u64) -> Result<()> {
    if d < 2 {
        return Err(domain("D must exceed 1"));
    }
    let f = factorize(&BigInt::from(d))?;
    if !f.is_squarefree() || f.omega() % 2 != 0 {
        return Err(domain(format!("{d} is not squarefree with an even number of prime factors")));
    }
    Ok(())
}

/// pi_1 of a QM surface: sum of eps_Delta h(Delta) over Delta in {4D, D (D = 1 mod 4)},
/// eps = 1/2 when the unit of the order has norm -1, else 1.
pub fn pi_one_surface(d: u64) -> Result<u64> {
    surface_disc(d)?;
    let mut discs = vec![4 * d];
    if d % 4 == 1 {
        discs.push(d);
    }
    let mut twice = 0u64;
    for v in discs {
        let disc = Discriminant::new(v)?;
        let h = h_real(&disc)?.h_wide;
        twice += if pell_norm_sign(&disc)? == -1 { h } else { 2 * h };
    }
    exact_div(twice, 2, "pi_1")
}

/// pi_0 of a QM surface from the closed form: (h(-4D) + h(-D))/2 when
/// D = 3 mod 4, h(-4D)/2 otherwise.
pub fn pi_zero_surface_closed_form(d: u64) -> Result<u64> {
    surface_disc(d)?;
    let d = d as i64;
    let mut sum = h_imag(&Discriminant::new(-4 * d)?)?;
    if d % 4 == 3 {
        sum += h_imag(&Discriminant::new(-d)?)?;
    }
    exact_div(sum, 2, "pi_0")
}

/// (pi_0, ..., pi_{2n}) and the total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolarizationProfile {
    pub pi_total: u64,
    pub pi_by_index: Vec<u64>,
    pub principal_exists: bool,
    pub polarizable: bool,
}

/// Profile by index. Orders over delta = uD with delta totally positive
/// carry bundles of even index, split as pi_0 + pi_2n + rest; a negative
/// place contributes index 1, so mixed signs give odd indices split evenly
/// under mu -> -mu. This stratification reproduces the surface formulas; for
/// n = 2 it is checked by example only.
pub fn pi_profile(ctx: &QMContext) -> Result<PolarizationProfile> {
    let n = ctx.base.degree;
    let principal_exists = principal_existence(ctx)?;
    let polar = polarizable(ctx)?;
    let pi0 = pi_zero(ctx)?;
    let sums = unit_sums(ctx)?;
    let h2 = 2 * ctx.base.h;
    let mut by_index = vec![0u64; 2 * n + 1];
    let mut total = 0;
    let mut even = 0;
    for (b, s) in &sums {
        let t = exact_div(*s, h2, "T_u")?;
        total += t;
        let neg = b.delta_signs.iter().filter(|&&x| x < 0).count();
        match (n, neg) {
            (_, 0) => even += t,
            (1, 1) | (2, 2) => by_index[n] += t,
            (2, 1) => {
                let half = exact_div(t, 2, "odd-index branch")?;
                by_index[1] += half;
                by_index[3] += half;
            }
            _ => return Err(Error::Unsupported(format!("profile for degree {n}"))),
        }
    }
    let rest = even.checked_sub(2 * pi0).ok_or_else(|| inconsistent("pi_0 exceeds the totally positive branches"))?;
    by_index[0] += pi0;
    by_index[2 * n] += pi0;
    if n == 1 && rest != 0 {
        return Err(inconsistent("surface branch with delta > 0 has bundles of index 1"));
    }
    by_index[n] += rest;
    if by_index.iter().sum::<u64>() != total {
        return Err(inconsistent("profile does not sum to pi"));
    }
    if (0..=2 * n).any(|i| by_index[i] != by_index[2 * n - i]) {
        return Err(inconsistent("profile is not symmetric"));
    }
    if ctx.base.is_rational() {
        let d = ctx.disc_generator.as_integer().and_then(|d| d.to_u64()).ok_or_else(|| domain("D"))?;
        let direct = pi_one_surface(d)?;
        if direct != by_index[1] {
            return Err(inconsistent(format!("pi_1 = {} from the total but {direct} from real orders", by_index[1])));
        }
    }
    Ok(PolarizationProfile { pi_total: total, pi_by_index: by_index, principal_exists, polarizable: polar })
}

/// e(S, O) = h(S)/h(F), the number of Eichler classes of optimal embeddings.
pub fn eichler_count(base: &BaseField, s: &CMOrderDescriptor) -> Result<u64> {
    exact_div(s.h_s, base.h, "h(S)/h(F)")
}

/// p(S, O) = 2^(e_S - 1) h(S)/h(F), the number of Pollack classes.
pub fn pollack_count(base: &BaseField, s: &CMOrderDescriptor) -> Result<u64> {
    let e = eichler_count(base, s)?;
    if s.e_s == 0 {
        exact_div(e, 2, "2^(e_S-1) h(S)/h(F)")
    } else {
        Ok(e << (s.e_s - 1))
    }
}
