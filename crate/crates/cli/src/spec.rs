//! Command-line parsing of elements and sign vectors ("+,-").

use qmpolar::field::{parse_elem, BaseField, FieldElem};
pub use qmpolar::field::parse_field;
use qmpolar::quat::SignatureVector;
use qmpolar::{Error, Result};

pub fn parse_element(field: &BaseField, s: &str) -> Result<FieldElem> {
    parse_elem(field.m(), s)
}

/// "+", "-,+", "1,-1" with one entry per real place; default all positive.
pub fn parse_signs(field: &BaseField, s: Option<&str>) -> Result<SignatureVector> {
    let Some(s) = s else {
        return Ok(SignatureVector(vec![1; field.degree]));
    };
    let signs = s
        .split(',')
        .map(|t| match t.trim() {
            "+" | "1" | "+1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(Error::Domain(format!("sign {other:?} is not + or -"))),
        })
        .collect::<Result<Vec<i8>>>()?;
    if signs.len() != field.degree {
        return Err(Error::Domain(format!("{} signs given, {} real places", signs.len(), field.degree)));
    }
    Ok(SignatureVector(signs))
}
