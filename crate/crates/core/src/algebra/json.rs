//! JSON encodings of scalars, points, polynomials and maps.
//!
//! Exact complex numbers are `["re", "im"]` pairs of rational strings
//! ("3/4", "-2", "0.125"); plain JSON numbers are accepted and read from
//! their decimal text, so `0.1` means exactly 1/10. The point at infinity
//! is the string `"inf"`.

use num_complex::Complex64;
use serde_json::{json, Value};

use super::exact::{format_rational, parse_rational, ExactComplex};
use super::poly::Poly;
use super::rational::{RationalMap, SpherePoint};
use crate::error::{Error, Result};

fn rational_field(v: &Value) -> Result<num_rational::BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
    }
}

pub fn exact_from_json(v: &Value) -> Result<ExactComplex> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            Ok(ExactComplex::new(rational_field(&a[0])?, rational_field(&a[1])?))
        }
        Value::String(_) | Value::Number(_) => Ok(ExactComplex::real(rational_field(v)?)),
        _ => Err(Error::Parse(format!("expected [re, im], got {v}"))),
    }
}

pub fn exact_to_json(z: &ExactComplex) -> Value {
    json!([format_rational(&z.re), format_rational(&z.im)])
}

pub fn c64_from_json(v: &Value) -> Result<Complex64> {
    let f = |x: &Value| -> Result<f64> {
        match x {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Value::String(s) => Ok(ExactComplex::real(parse_rational(s)?).to_c64().re),
            _ => Err(Error::Parse(format!("expected a number, got {x}"))),
        }
    };
    match v {
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(f(&a[0])?, f(&a[1])?)),
        Value::Number(_) => Ok(Complex64::new(f(v)?, 0.0)),
        _ => Err(Error::Parse(format!("expected [re, im], got {v}"))),
    }
}

pub fn c64_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn is_infinity_token(v: &Value) -> bool {
    matches!(v, Value::String(s) if matches!(s.as_str(), "inf" | "infinity" | "∞"))
}

pub fn point_from_json(v: &Value) -> Result<SpherePoint<ExactComplex>> {
    if is_infinity_token(v) {
        Ok(SpherePoint::Infinity)
    } else {
        Ok(SpherePoint::Finite(exact_from_json(v)?))
    }
}

pub fn point_c64_from_json(v: &Value) -> Result<SpherePoint<Complex64>> {
    if is_infinity_token(v) {
        Ok(SpherePoint::Infinity)
    } else {
        Ok(SpherePoint::Finite(c64_from_json(v)?))
    }
}

pub fn point_to_json(p: &SpherePoint<Complex64>) -> Value {
    match p {
        SpherePoint::Finite(z) => c64_to_json(*z),
        SpherePoint::Infinity => json!("inf"),
    }
}

pub fn exact_point_to_json(p: &SpherePoint<ExactComplex>) -> Value {
    match p {
        SpherePoint::Finite(z) => exact_to_json(z),
        SpherePoint::Infinity => json!("inf"),
    }
}

pub fn poly_from_json(v: &Value) -> Result<Poly<ExactComplex>> {
    let a = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected a coefficient list, got {v}")))?;
    Ok(Poly::new(a.iter().map(exact_from_json).collect::<Result<_>>()?))
}

pub fn poly_to_json(p: &Poly<ExactComplex>) -> Value {
    Value::Array(p.coeffs().iter().map(exact_to_json).collect())
}

/// `{"num": [...], "den": [...]}`; a missing `den` means 1.
pub fn map_from_json(v: &Value) -> Result<RationalMap<ExactComplex>> {
    let num = v
        .get("num")
        .ok_or_else(|| Error::Parse("rational map needs \"num\"".into()))?;
    let num = poly_from_json(num)?;
    let den = match v.get("den") {
        Some(d) => poly_from_json(d)?,
        None => Poly::one(),
    };
    RationalMap::new(num, den)
}

pub fn map_to_json(r: &RationalMap<ExactComplex>) -> Value {
    json!({"num": poly_to_json(r.num()), "den": poly_to_json(r.den())})
}
