//! wasm-bindgen surface for the static demo page. Every function returns a
//! JSON string; failures come back as a thrown {error_kind, message} object.

use serde_json::json;
use wasm_bindgen::prelude::*;

use qmpolar::field::{parse_elem, parse_field};
use qmpolar::polar::{pi_profile, pi_zero_detailed, QMContext};
use qmpolar::quat::discriminant_of;
use qmpolar::{Error, Result};

fn to_js(e: Error) -> JsValue {
    JsValue::from_str(&json!({"error_kind": e.kind(), "message": e.to_string()}).to_string())
}

fn context(field: &str, disc: &str) -> Result<QMContext> {
    let base = parse_field(field)?;
    let d = parse_elem(base.m(), disc)?;
    QMContext::over(&base, d)
}

/// pi_0 with the per-order breakdown.
pub fn pi0_json(field: &str, disc: &str) -> Result<String> {
    let ctx = context(field, disc)?;
    let count = pi_zero_detailed(&ctx)?;
    Ok(json!({"field": ctx.base.name(), "pi0": count.value, "branches": count.branches}).to_string())
}

/// (pi_0, ..., pi_2n) and the total.
pub fn profile_json(field: &str, disc: &str) -> Result<String> {
    let ctx = context(field, disc)?;
    Ok(json!({"field": ctx.base.name(), "profile": pi_profile(&ctx)?}).to_string())
}

/// Ramified primes of (a, b / Q).
pub fn algebra_json(a: i64, b: i64) -> Result<String> {
    let alg = discriminant_of(&a.into(), &b.into())?;
    let disc: u128 = alg.ramified_finite.iter().map(|&p| p as u128).product();
    Ok(json!({
        "ramified_primes": alg.ramified_finite,
        "discriminant": disc.to_string(),
        "definite": !alg.totally_indefinite,
        "division": alg.division,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn pi0(field: &str, disc: &str) -> std::result::Result<String, JsValue> {
    pi0_json(field, disc).map_err(to_js)
}

#[wasm_bindgen]
pub fn profile(field: &str, disc: &str) -> std::result::Result<String, JsValue> {
    profile_json(field, disc).map_err(to_js)
}

#[wasm_bindgen]
pub fn algebra(a: f64, b: f64) -> std::result::Result<String, JsValue> {
    if a.fract() != 0.0 || b.fract() != 0.0 || a.abs() > 1e15 || b.abs() > 1e15 {
        return Err(to_js(Error::Domain("a and b must be integers".into())));
    }
    algebra_json(a as i64, b as i64).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operations() {
        let v: serde_json::Value = serde_json::from_str(&pi0_json("Q", "6").unwrap()).unwrap();
        assert_eq!(v["pi0"], 1);
        let v: serde_json::Value = serde_json::from_str(&profile_json("Q", "6").unwrap()).unwrap();
        assert_eq!(v["profile"]["pi_by_index"], json!([1, 1, 1]));
        let v: serde_json::Value = serde_json::from_str(&algebra_json(-1, 3).unwrap()).unwrap();
        assert_eq!(v["discriminant"], "6");
        assert!(matches!(pi0_json("Q", "5"), Err(Error::Domain(_))));
    }
}
