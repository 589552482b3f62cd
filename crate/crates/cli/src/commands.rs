use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use qmpolar::arith::Discriminant;
use qmpolar::cm::{conductor, h_imag, h_real, order_lattice};
use qmpolar::bqf::pell_unit;
use qmpolar::field::{BaseField, FieldElem, FieldIdeal};
use qmpolar::polar::{
    pi_profile, pi_total_detailed, pi_zero_detailed, polarizable, principal_existence, Count, QMContext,
};
use qmpolar::quat::{discriminant_of, global_index, hilbert_symbol, orientation, PureQuaternion, QPlace, QuaternionAlgebra};
use qmpolar::{Error, Result};

use crate::cache::{Cache, Kind};
use crate::spec::{parse_element, parse_field, parse_signs};
use crate::ContextArgs;

/// What a command prints: plain text, or JSON under --json.
pub struct Report {
    pub text: String,
    pub json: Value,
}

pub struct Context {
    pub ctx: QMContext,
    pub disc: FieldElem,
    key: Vec<String>,
}

impl Context {
    pub fn build(args: &ContextArgs) -> Result<Self> {
        let base = parse_field(&args.field)?;
        let disc = parse_element(&base, &args.disc)?;
        let ideal_norm = parse_element(&base, &args.ideal_norm)?;
        let tau = parse_signs(&base, args.tau.as_deref())?;
        let key = vec![
            base.m().to_string(),
            disc.to_string(),
            args.level.to_string(),
            ideal_norm.to_string(),
            tau.0.iter().map(|s| if *s > 0 { '+' } else { '-' }).collect(),
        ];
        let ctx = QMContext::new(&base, disc.clone(), args.level, ideal_norm, tau)?;
        Ok(Context { ctx, disc, key })
    }

    pub fn key(&self) -> Vec<String> {
        self.key.clone()
    }
}

// A recomputed count must agree with whatever the memo already holds.
fn reconcile(cache: &Cache, kind: Kind, key: Vec<String>, value: u64) -> Result<()> {
    let held = cache.integer(kind, key, || Ok(value))?;
    if held != value {
        return Err(Error::Inconsistency(format!(
            "cached {kind:?} value {held} differs from the recomputed {value}"
        )));
    }
    Ok(())
}

fn count_report(name: &str, c: &Context, count: &Count) -> Report {
    let mut text = format!("{}\n", count.value);
    for b in &count.branches {
        let _ = writeln!(text, "# u = {}, delta = {}, |d_L| = {}, h(L) = {}", b.unit, b.delta, b.abs_disc_l, b.h_l);
        let _ = writeln!(text, "#   {:>14} {:>6} {:>10} {:>4} {:>5}", "conductor", "N(f)", "h(S)", "e_S", "e_S+");
        for o in &b.orders {
            let _ = writeln!(
                text,
                "#   {:>14} {:>6} {:>10} {:>4} {:>5}",
                o.conductor, o.conductor_norm, o.h_s, o.e_s, o.e_s_plus
            );
        }
    }
    let json = json!({
        "field": c.ctx.base.name(),
        "disc": c.disc.to_string(),
        name: count.value,
        "branches": count.branches,
    });
    Report { text, json }
}

pub fn pi0(args: &ContextArgs, brief: bool, cache: &Cache) -> Result<Report> {
    let c = Context::build(args)?;
    if brief {
        let v = cache.integer(Kind::Pi0, c.key(), || qmpolar::polar::pi_zero(&c.ctx))?;
        return Ok(Report { text: format!("{v}\n"), json: json!({"field": c.ctx.base.name(), "disc": c.disc.to_string(), "pi0": v}) });
    }
    let count = pi_zero_detailed(&c.ctx)?;
    reconcile(cache, Kind::Pi0, c.key(), count.value)?;
    Ok(count_report("pi0", &c, &count))
}

pub fn pitotal(args: &ContextArgs, brief: bool, cache: &Cache) -> Result<Report> {
    let c = Context::build(args)?;
    if brief {
        let v = cache.integer(Kind::PiTotal, c.key(), || qmpolar::polar::pi_total(&c.ctx))?;
        return Ok(Report { text: format!("{v}\n"), json: json!({"field": c.ctx.base.name(), "disc": c.disc.to_string(), "pi_total": v}) });
    }
    let count = pi_total_detailed(&c.ctx)?;
    reconcile(cache, Kind::PiTotal, c.key(), count.value)?;
    Ok(count_report("pi_total", &c, &count))
}

pub fn profile(args: &ContextArgs, cache: &Cache) -> Result<Report> {
    let c = Context::build(args)?;
    let p = pi_profile(&c.ctx)?;
    reconcile(cache, Kind::Pi0, c.key(), p.pi_by_index[0])?;
    reconcile(cache, Kind::PiTotal, c.key(), p.pi_total)?;
    let entries: Vec<String> = p.pi_by_index.iter().map(u64::to_string).collect();
    let text = format!("({}) total {}\n", entries.join(", "), p.pi_total);
    let json = json!({"field": c.ctx.base.name(), "disc": c.disc.to_string(), "profile": p});
    Ok(Report { text, json })
}

pub fn polarizable_cmd(args: &ContextArgs) -> Result<Report> {
    let c = Context::build(args)?;
    let principal = principal_existence(&c.ctx)?;
    let polar = polarizable(&c.ctx)?;
    Ok(Report {
        text: format!("principal line bundle: {principal}\nprincipally polarizable: {polar}\n"),
        json: json!({
            "field": c.ctx.base.name(),
            "disc": c.disc.to_string(),
            "tau_signs": c.ctx.tau_signs,
            "principal_exists": principal,
            "polarizable": polar,
        }),
    })
}

#[derive(Serialize)]
struct OrderRow {
    conductor: String,
    conductor_norm: u64,
    h_s: u64,
    unit_index: u64,
    e_s: u32,
    e_s_plus: u32,
    ample: Option<bool>,
}

pub fn classnum(disc: Option<&str>, field: &str, delta: Option<&str>, cache: &Cache) -> Result<Report> {
    match (disc, delta) {
        (Some(d), None) => classnum_rational(d, cache),
        (None, Some(delta)) => classnum_cm(field, delta, cache),
        _ => Err(Error::Domain("give exactly one of --disc (order over Q) or --delta (CM extension)".into())),
    }
}

fn classnum_rational(d: &str, cache: &Cache) -> Result<Report> {
    let v: i128 = d.trim().parse().map_err(|_| Error::Domain(format!("{d:?} is not an integer")))?;
    let disc = Discriminant::new(v)?;
    let key = vec![disc.value.to_string()];
    let base = json!({
        "disc": disc.value.to_string(),
        "fundamental_part": disc.fundamental_part.to_string(),
        "conductor": disc.conductor.to_string(),
    });
    if disc.is_negative() {
        let h = cache.integer(Kind::HImag, key, || h_imag(&disc))?;
        let mut json = base;
        json["h"] = json!(h);
        return Ok(Report { text: format!("{h}\n"), json });
    }
    let wide = cache.integer(Kind::HRealWide, key.clone(), || Ok(h_real(&disc)?.h_wide))?;
    let narrow = cache.integer(Kind::HRealNarrow, key.clone(), || Ok(h_real(&disc)?.h_narrow))?;
    let pell = cache.get_or_compute(Kind::Pell, key, || {
        let u = pell_unit(&disc)?;
        Ok(vec![u.x.to_string(), u.y.to_string(), u.norm_sign.to_string()])
    })?;
    let mut json = base;
    json["h"] = json!(wide);
    json["h_narrow"] = json!(narrow);
    json["unit"] = json!({"x": pell[0], "y": pell[1], "norm_sign": pell[2]});
    let text = format!(
        "{wide}\n# narrow {narrow}; fundamental unit ({} + {} sqrt({}))/2 of norm {}\n",
        pell[0], pell[1], disc.value, pell[2]
    );
    Ok(Report { text, json })
}

fn classnum_cm(field: &str, delta: &str, cache: &Cache) -> Result<Report> {
    let base = parse_field(field)?;
    let delta = parse_element(&base, delta)?;
    let ext = conductor(&base, &delta)?;
    let h_l = cache.integer(Kind::HQuartic, vec![base.m().to_string(), delta.to_string()], || Ok(ext.h_l))?;
    if h_l != ext.h_l {
        return Err(Error::Inconsistency(format!("cached h(L) {h_l} differs from the recomputed {}", ext.h_l)));
    }
    let rows: Vec<OrderRow> = order_lattice(&ext)?
        .into_iter()
        .map(|o| OrderRow {
            conductor: o.conductor_divisor.to_string(),
            conductor_norm: o.conductor_divisor_norm,
            h_s: o.h_s,
            unit_index: o.unit_index,
            e_s: o.e_s,
            e_s_plus: o.e_s_plus,
            ample: o.ample,
        })
        .collect();
    let mut text = format!("{h_l}\n# |d_L| = {}, conductor {} of norm {}\n", ext.abs_disc_l, ext.conductor, ext.conductor_norm);
    for r in &rows {
        let _ = writeln!(
            text,
            "# f = {:>10}  h(S) = {:>6}  [O_L*:S*] = {}  e_S = {}  e_S+ = {}",
            r.conductor, r.h_s, r.unit_index, r.e_s, r.e_s_plus
        );
    }
    let json = json!({
        "field": base.name(),
        "delta": delta.to_string(),
        "abs_disc_l": ext.abs_disc_l.to_string(),
        "conductor": ext.conductor.to_string(),
        "conductor_norm": ext.conductor_norm,
        "h_l": h_l,
        "orders": rows,
    });
    Ok(Report { text, json })
}

fn parse_place(s: &str) -> Result<QPlace> {
    match s.trim() {
        "inf" | "infinity" | "oo" => Ok(QPlace::Infinity),
        p => p
            .parse()
            .map(QPlace::Prime)
            .map_err(|_| Error::Domain(format!("place {p:?} is neither a prime nor inf"))),
    }
}

pub fn hilbert(a: &str, b: &str, place: Option<&str>) -> Result<Report> {
    let q = BaseField::rational();
    let (ae, be) = (parse_element(&q, a)?, parse_element(&q, b)?);
    if let Some(place) = place {
        let v = parse_place(place)?;
        let s = hilbert_symbol(&ae.x, &be.x, v)?;
        let json = json!({"a": ae.to_string(), "b": be.to_string(), "place": place, "symbol": s});
        return Ok(Report { text: format!("{s}\n"), json });
    }
    // same square classes, integral representatives
    let ai = ae.x.numer() * ae.x.denom();
    let bi = be.x.numer() * be.x.denom();
    let alg = discriminant_of(&ai, &bi)?;
    let disc: u128 = alg.ramified_finite.iter().map(|&p| p as u128).product();
    let text = format!(
        "{disc}\n# ramified primes {:?}; {}; {}\n",
        alg.ramified_finite,
        if alg.totally_indefinite { "indefinite" } else { "definite" },
        if alg.division { "division algebra" } else { "matrix algebra" }
    );
    let json = json!({
        "a": ae.to_string(),
        "b": be.to_string(),
        "ramified_primes": alg.ramified_finite,
        "discriminant": disc.to_string(),
        "definite": !alg.totally_indefinite,
        "division": alg.division,
    });
    Ok(Report { text, json })
}

pub struct IndexInput<'a> {
    pub field: &'a str,
    pub a: &'a str,
    pub b: &'a str,
    pub mu: &'a str,
    pub tau: Option<&'a str>,
    pub algebra_disc: &'a str,
}

pub fn index(input: &IndexInput) -> Result<Report> {
    let base = parse_field(input.field)?;
    let a = parse_element(&base, input.a)?;
    let b = parse_element(&base, input.b)?;
    let alg = if base.is_rational() {
        QuaternionAlgebra::with_discriminant(&base, a, b, FieldIdeal::unit(&base))?
    } else {
        let d = parse_element(&base, input.algebra_disc)?;
        QuaternionAlgebra::with_discriminant(&base, a, b, FieldIdeal::principal(&base, d))?
    };
    let coords: Vec<&str> = input.mu.split(',').collect();
    let [x, y, z] = coords.as_slice() else {
        return Err(Error::Domain(format!("mu {:?} needs three coordinates x,y,z", input.mu)));
    };
    let mu = PureQuaternion::new(
        &alg,
        parse_element(&base, x)?,
        parse_element(&base, y)?,
        parse_element(&base, z)?,
    )?;
    let tau = parse_signs(&base, input.tau)?;
    let idx = global_index(&alg, &mu, &tau)?;
    let places: Vec<Value> = (0..base.degree)
        .map(|p| orientation(&alg, &mu, p).map(|o| json!({"place": p, "delta_sign": o.delta_sign, "det_sign": o.det_sign})))
        .collect::<Result<_>>()?;
    let text = format!("{idx}\n# mu^2 = -({}); index of the dual bundle {}\n", mu.delta, 2 * base.degree as u32 - idx);
    let json = json!({
        "field": base.name(),
        "a": alg.a.to_string(),
        "b": alg.b.to_string(),
        "delta": mu.delta.to_string(),
        "tau_signs": tau,
        "index": idx,
        "places": places,
    });
    Ok(Report { text, json })
}
