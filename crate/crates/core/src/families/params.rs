use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::Value;

use super::expr::{parse_expr, Expr};
use super::FamilyId;
use crate::algebra::json::{c64_from_json, c64_to_json, exact_from_json};
use crate::algebra::{ExactComplex, Scalar};
use crate::error::{Error, Result};

/// Named complex parameters of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet<S> {
    values: BTreeMap<String, S>,
}

impl<S> Default for ParamSet<S> {
    fn default() -> Self {
        ParamSet {
            values: BTreeMap::new(),
        }
    }
}

/// Maps Greek letters and subscripts to the ASCII parameter names.
pub(crate) fn canonical_name(name: &str) -> String {
    match name.trim() {
        "σ" => "sigma".into(),
        "τ" => "tau".into(),
        "θ" => "theta".into(),
        "b₁" | "b_1" => "b1".into(),
        "b₂" | "b_2" => "b2".into(),
        other => other.to_string(),
    }
}

impl<S: Scalar> ParamSet<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: S) -> Self {
        self.insert(name, v);
        self
    }

    pub fn insert(&mut self, name: &str, v: S) {
        self.values.insert(canonical_name(name), v);
    }

    pub fn remove(&mut self, name: &str) -> Option<S> {
        self.values.remove(&canonical_name(name))
    }

    pub fn get(&self, name: &str) -> Option<&S> {
        self.values.get(&canonical_name(name))
    }

    /// The value, or `InvalidParams` naming the missing parameter.
    pub fn require(&self, id: FamilyId, name: &str) -> Result<S> {
        self.get(name).cloned().ok_or_else(|| Error::InvalidParams {
            family: id.to_string(),
            predicate: format!("parameter {name} is required"),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &S)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_c64(&self) -> ParamSet<Complex64> {
        ParamSet {
            values: self.values.iter().map(|(k, v)| (k.clone(), v.to_c64())).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.values
                .iter()
                .map(|(k, v)| (k.clone(), c64_to_json(v.to_c64())))
                .collect(),
        )
    }
}

enum Raw {
    Expr(Expr),
    Value(Value),
}

/// Parameter entries in dependency order; strings may refer to other names.
fn raw_entries(v: &Value) -> Result<Vec<(String, Raw)>> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("parameters must be a JSON object".into()))?;
    let mut pending: Vec<(String, Raw)> = Vec::new();
    for (k, x) in obj {
        let raw = match x {
            Value::String(s) => Raw::Expr(parse_expr(s)?),
            other => Raw::Value(other.clone()),
        };
        pending.push((canonical_name(k), raw));
    }
    let mut done: Vec<(String, Raw)> = Vec::new();
    while !pending.is_empty() {
        let known: Vec<String> = done.iter().map(|e| e.0.clone()).collect();
        let ready = pending.iter().position(|(_, r)| match r {
            Raw::Value(_) => true,
            Raw::Expr(e) => {
                let mut vs = Vec::new();
                e.vars(&mut vs);
                vs.iter().all(|n| known.contains(n))
            }
        });
        match ready {
            Some(i) => done.push(pending.remove(i)),
            None => {
                return Err(Error::Parse(format!(
                    "unresolved or cyclic parameter references among {:?}",
                    pending.iter().map(|e| &e.0).collect::<Vec<_>>()
                )))
            }
        }
    }
    Ok(done)
}

impl ParamSet<Complex64> {
    /// `{"sigma": "exp(i*pi/6)", "b": "-3/13*sigma", "tau": [0, 0]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let mut env = BTreeMap::new();
        for (k, raw) in raw_entries(v)? {
            let z = match raw {
                Raw::Expr(e) => e.eval_c64(&env)?,
                Raw::Value(x) => c64_from_json(&x)?,
            };
            env.insert(k, z);
        }
        Ok(ParamSet { values: env })
    }
}

impl ParamSet<ExactComplex> {
    /// Exact parameters, or `None` when some value needs `sqrt`, `exp` or `pi`.
    pub fn from_json_exact(v: &Value) -> Result<Option<Self>> {
        let mut env = BTreeMap::new();
        for (k, raw) in raw_entries(v)? {
            let z = match raw {
                Raw::Expr(e) => match e.eval_exact(&env) {
                    Some(z) => z,
                    None => return Ok(None),
                },
                Raw::Value(x) => exact_from_json(&x)?,
            };
            env.insert(k, z);
        }
        Ok(Some(ParamSet { values: env }))
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The parameters of the worked examples, as floats.
pub fn example_params(id: FamilyId) -> Option<ParamSet<Complex64>> {
    let e6 = c(0.0, std::f64::consts::PI / 6.0).exp();
    let e3 = c(0.0, std::f64::consts::PI / 3.0).exp();
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let t47 = |sigma: Complex64, b: Complex64| {
        ParamSet::new()
            .with("sigma", sigma)
            .with("tau", zero)
            .with("b", b)
            .with("theta", one)
    };
    Some(match id {
        FamilyId::Ms => ParamSet::new()
            .with("a", c(-1.0, 0.0))
            .with("t", zero)
            .with("sigma", c(0.0, (3.0f64 / 5.0).sqrt())),
        FamilyId::Kw => ParamSet::new()
            .with("a", zero)
            .with("b", c(2.0, 0.0))
            .with("sigma", c(0.0, (3.0f64 / 5.0).sqrt())),
        FamilyId::T47C1W1 => t47(e6, -3.0 * e6 / 13.0),
        FamilyId::T47C1W2 => t47(e6, -5.0 * e6 / 11.0),
        FamilyId::T47C1W5 => {
            let s = c((13.0f64 / 2.0).sqrt(), 0.0);
            t47(s, -s / 7.0)
        }
        FamilyId::T47C1W8 => t47(e3, -e3 / 3.0),
        FamilyId::T47C4W5 => t47(e6, -e6 / 3.0),
        FamilyId::P49W5 => {
            let b1 = c(-4.0 * 10f64.sqrt() / 13.0, 3.0 / 13.0);
            ParamSet::new()
                .with("sigma", c(0.0, 1.0))
                .with("b1", b1)
                .with("b2", -b1.conj())
                .with("theta", one)
        }
        _ => ParamSet::new(),
    })
}

/// Rational parameters satisfying the same constraints, where they exist.
pub fn exact_example_params(id: FamilyId) -> Option<ParamSet<ExactComplex>> {
    type E = ExactComplex;
    let r = E::from_ratio;
    let t47 = |sigma: E, b: E| {
        ParamSet::new()
            .with("sigma", sigma)
            .with("tau", E::zero())
            .with("b", b)
            .with("theta", E::one())
    };
    match id {
        FamilyId::T47C1W1 => Some(t47(E::i(), E::i() * r(-3, 13))),
        FamilyId::T47C1W2 => Some(t47(E::i(), E::i() * r(-5, 11))),
        FamilyId::T47C1W8 => Some(t47(E::one(), r(-1, 3))),
        FamilyId::T47C4W5 => Some(t47(E::i(), E::i() * r(-1, 3))),
        id if id.is_canonical() => Some(ParamSet::new()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_with_references() {
        let p = ParamSet::from_json(&json!({
            "b": "-3/13*sigma", "σ": "exp(i*pi/6)", "tau": [0, 0], "theta": 1
        }))
        .unwrap();
        let s = *p.get("sigma").unwrap();
        assert!((*p.get("b").unwrap() + 3.0 * s / 13.0).norm() < 1e-15);
        assert_eq!(*p.get("theta").unwrap(), c(1.0, 0.0));
        assert!(ParamSet::from_json(&json!({"a": "b", "b": "a"})).is_err());
        assert!(ParamSet::from_json(&json!([1, 2])).is_err());
    }

    #[test]
    fn exact_json_when_rational() {
        let p = ParamSet::from_json_exact(&json!({"sigma": "i", "b": "-3/13*sigma", "tau": 0}))
            .unwrap()
            .unwrap();
        assert_eq!(p.get("b").unwrap().to_c64(), c(0.0, -3.0 / 13.0));
        assert!(ParamSet::from_json_exact(&json!({"sigma": "sqrt(2)"}))
            .unwrap()
            .is_none());
    }

    #[test]
    fn examples_have_all_names() {
        for id in FamilyId::ALL {
            let p = example_params(id).unwrap();
            for n in id.param_names() {
                assert!(p.get(n).is_some(), "{id} lacks {n}");
            }
        }
    }
}
