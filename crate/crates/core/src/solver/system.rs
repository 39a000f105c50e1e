use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::families::{
    build, canonical_name, case2_residue_triple, parse_expr, period_constraints, Expr, FamilyId, ParamSet,
};

/// What the residual is computed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Family(FamilyId),
    /// The residue triple at `-i` for the second allocation case, over `(tau, u)`.
    Case2W1,
}

impl Target {
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Target::Family(id) => id.param_names(),
            Target::Case2W1 => &["tau", "u"],
        }
    }

    pub fn family(self) -> Option<FamilyId> {
        match self {
            Target::Family(id) => Some(id),
            Target::Case2W1 => None,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Family(id) => write!(f, "{id}"),
            Target::Case2W1 => f.write_str("case2-w1"),
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        if key == "case2-w1" {
            return Ok(Target::Case2W1);
        }
        Ok(Target::Family(s.parse()?))
    }
}

/// One real unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeVar {
    Re(String),
    Im(String),
    /// The argument of a parameter whose modulus stays fixed (1 if unset).
    Arg(String),
}

impl FreeVar {
    pub fn name(&self) -> &str {
        match self {
            FreeVar::Re(n) | FreeVar::Im(n) | FreeVar::Arg(n) => n,
        }
    }

    /// `sigma` expands to both parts; `sigma.re`, `im(sigma)`, `arg(sigma)` to one.
    pub fn parse(s: &str) -> Result<Vec<FreeVar>> {
        let s = s.trim();
        let wrapped = |f: &str| {
            s.strip_prefix(f)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
                .map(canonical_name)
        };
        if let Some(n) = wrapped("arg") {
            return Ok(vec![FreeVar::Arg(n)]);
        }
        if let Some(n) = wrapped("re").or_else(|| s.strip_suffix(".re").map(canonical_name)) {
            return Ok(vec![FreeVar::Re(n)]);
        }
        if let Some(n) = wrapped("im").or_else(|| s.strip_suffix(".im").map(canonical_name)) {
            return Ok(vec![FreeVar::Im(n)]);
        }
        if s.is_empty() || s.contains(|c: char| "().".contains(c)) {
            return Err(Error::Parse(format!("bad free variable \"{s}\"")));
        }
        let n = canonical_name(s);
        Ok(vec![FreeVar::Re(n.clone()), FreeVar::Im(n)])
    }
}

impl fmt::Display for FreeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeVar::Re(n) => write!(f, "{n}.re"),
            FreeVar::Im(n) => write!(f, "{n}.im"),
            FreeVar::Arg(n) => write!(f, "arg({n})"),
        }
    }
}

/// Period constraints of a family as a map from free real variables to residuals.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub target: Target,
    pub fixed: ParamSet<Complex64>,
    /// Substitutions, evaluated in this order after the free variables are set.
    pub ties: Vec<(String, Expr)>,
    pub free: Vec<FreeVar>,
    /// Lower bounds on parameter moduli, enforced as a barrier.
    pub min_modulus: BTreeMap<String, f64>,
}

fn config(msg: impl Into<String>) -> Error {
    Error::ConfigError(msg.into())
}

impl ConstraintSystem {
    pub fn new(
        target: Target,
        fixed: ParamSet<Complex64>,
        ties: Vec<(String, Expr)>,
        free: Vec<FreeVar>,
    ) -> Result<Self> {
        if free.is_empty() {
            return Err(config("the free-parameter mask is empty"));
        }
        if let Target::Family(id) = target {
            if !id.is_period_constrained() {
                return Err(config(format!("{id} has no period constraint system")));
            }
        }
        let names = target.param_names();
        let mut seen: Vec<(usize, String)> = Vec::new();
        for v in &free {
            if !names.contains(&v.name()) {
                return Err(config(format!("{v} is not a parameter of {target}")));
            }
            let slot = match v {
                FreeVar::Re(_) => 1,
                FreeVar::Im(_) => 2,
                FreeVar::Arg(_) => 3,
            };
            for (s, n) in &seen {
                if n == v.name() && (*s == slot || *s == 3 || slot == 3) {
                    return Err(config(format!("{v} overlaps another free variable")));
                }
            }
            seen.push((slot, v.name().to_string()));
        }
        let ordered = order_ties(ties)?;
        for (n, _) in &ordered {
            if !names.contains(&n.as_str()) {
                return Err(config(format!("tied name {n} is not a parameter of {target}")));
            }
            if fixed.get(n).is_some() || free.iter().any(|v| v.name() == n) {
                return Err(config(format!("{n} is both tied and fixed or free")));
            }
        }
        for n in names {
            let known = fixed.get(n).is_some()
                || free.iter().any(|v| v.name() == *n)
                || ordered.iter().any(|t| t.0 == *n);
            if !known {
                return Err(config(format!("parameter {n} is neither fixed, tied nor free")));
            }
        }
        let mut min_modulus = BTreeMap::new();
        if target == Target::Case2W1 {
            min_modulus.insert("u".to_string(), 0.1);
        }
        Ok(ConstraintSystem {
            target,
            fixed,
            ties: ordered,
            free,
            min_modulus,
        })
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Parameters at the free vector `x`.
    pub fn params(&self, x: &[f64]) -> Result<ParamSet<Complex64>> {
        let mut env: BTreeMap<String, Complex64> = self.fixed.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (v, &t) in self.free.iter().zip(x) {
            let e = env
                .entry(v.name().to_string())
                .or_insert(Complex64::new(0.0, 0.0));
            match v {
                FreeVar::Re(_) => e.re = t,
                FreeVar::Im(_) => e.im = t,
                FreeVar::Arg(_) => {
                    let r = if e.norm() > 0.0 { e.norm() } else { 1.0 };
                    *e = Complex64::from_polar(r, t);
                }
            }
        }
        for (n, ex) in &self.ties {
            let z = ex.eval_c64(&env)?;
            env.insert(n.clone(), z);
        }
        let mut p = ParamSet::new();
        for (k, v) in env {
            p.insert(&k, v);
        }
        Ok(p)
    }

    /// Free vector of a full parameter set (ties are ignored).
    pub fn vector_of(&self, p: &ParamSet<Complex64>) -> Result<Vec<f64>> {
        self.free
            .iter()
            .map(|v| {
                let z = p
                    .get(v.name())
                    .ok_or_else(|| config(format!("start is missing {}", v.name())))?;
                Ok(match v {
                    FreeVar::Re(_) => z.re,
                    FreeVar::Im(_) => z.im,
                    FreeVar::Arg(_) => z.arg(),
                })
            })
            .collect()
    }

    /// Residual vector, or an error when `x` leaves the validity domain.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.params(x)?;
        for (n, &m) in &self.min_modulus {
            if p.get(n).map_or(true, |z| z.norm() < m) {
                return Err(Error::InvalidParams {
                    family: self.target.to_string(),
                    predicate: format!("|{n}| >= {m}"),
                });
            }
        }
        let r = match self.target {
            Target::Family(id) => {
                build(id, &p)?;
                period_constraints(id, &p)?
            }
            Target::Case2W1 => {
                let t = case2_residue_triple(p.require_named("u")?, p.require_named("tau")?);
                t.iter().map(|z| z.im).collect()
            }
        };
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("period residual".into()));
        }
        Ok(r)
    }

    /// `{"family", "fix", "tie", "free"}`; other keys are ignored here.
    pub fn from_json(v: &Value) -> Result<Self> {
        let target: Target = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("solve spec needs a \"family\" string".into()))?
            .parse()?;
        let fixed = match v.get("fix") {
            Some(f) => ParamSet::from_json(f)?,
            None => ParamSet::new(),
        };
        let mut ties = Vec::new();
        if let Some(t) = v.get("tie") {
            let obj = t
                .as_object()
                .ok_or_else(|| Error::Parse("\"tie\" must be an object".into()))?;
            for (k, e) in obj {
                let s = e
                    .as_str()
                    .ok_or_else(|| Error::Parse(format!("tie for {k} must be a string")))?;
                ties.push((canonical_name(k), parse_expr(s)?));
            }
        }
        let mut free = Vec::new();
        for f in v
            .get("free")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("\"free\" must be an array".into()))?
        {
            let s = f
                .as_str()
                .ok_or_else(|| Error::Parse("free entries must be strings".into()))?;
            free.extend(FreeVar::parse(s)?);
        }
        let mut sys = ConstraintSystem::new(target, fixed, ties, free)?;
        if let Some(m) = v.get("min_modulus").and_then(Value::as_object) {
            for (k, x) in m {
                let x = x
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("min_modulus for {k} must be a number")))?;
                sys.min_modulus.insert(canonical_name(k), x);
            }
        }
        Ok(sys)
    }
}

/// Ties sorted so that each one only refers to names set before it.
fn order_ties(mut pending: Vec<(String, Expr)>) -> Result<Vec<(String, Expr)>> {
    let mut done: Vec<(String, Expr)> = Vec::new();
    while !pending.is_empty() {
        let pos = pending.iter().position(|(_, e)| {
            let mut vs = Vec::new();
            e.vars(&mut vs);
            vs.iter().all(|n| !pending.iter().any(|p| &p.0 == n))
        });
        match pos {
            Some(i) => done.push(pending.remove(i)),
            None => return Err(config("cyclic ties")),
        }
    }
    Ok(done)
}

trait RequireNamed {
    fn require_named(&self, n: &str) -> Result<Complex64>;
}

impl RequireNamed for ParamSet<Complex64> {
    fn require_named(&self, n: &str) -> Result<Complex64> {
        self.get(n)
            .copied()
            .ok_or_else(|| config(format!("parameter {n} is missing")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn w1() -> ConstraintSystem {
        ConstraintSystem::from_json(&json!({
            "family": "t47-c1-w1",
            "fix": {"tau": [0, 0], "theta": [1, 0]},
            "tie": {"b": "-3/13*sigma"},
            "free": ["arg(sigma)"]
        }))
        .unwrap()
    }

    #[test]
    fn free_variable_syntax() {
        assert_eq!(
            FreeVar::parse("σ").unwrap(),
            vec![FreeVar::Re("sigma".into()), FreeVar::Im("sigma".into())]
        );
        assert_eq!(FreeVar::parse("b1.im").unwrap(), vec![FreeVar::Im("b1".into())]);
        assert_eq!(
            FreeVar::parse("re(tau)").unwrap(),
            vec![FreeVar::Re("tau".into())]
        );
        assert_eq!(
            FreeVar::parse("arg(sigma)").unwrap(),
            vec![FreeVar::Arg("sigma".into())]
        );
        assert!(FreeVar::parse("sigma.x").is_err());
    }

    #[test]
    fn tie_is_applied() {
        let s = w1();
        let p = s.params(&[std::f64::consts::FRAC_PI_6]).unwrap();
        let sigma = *p.get("sigma").unwrap();
        assert!((sigma.norm() - 1.0).abs() < 1e-15);
        assert!((*p.get("b").unwrap() + 3.0 / 13.0 * sigma).norm() < 1e-15);
        let r = s.residual(&[std::f64::consts::FRAC_PI_6]).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
    }

    #[test]
    fn empty_mask_is_a_config_error() {
        let e = ConstraintSystem::from_json(&json!({
            "family": "t47-c1-w1",
            "fix": {"tau": [0, 0], "theta": [1, 0], "sigma": [0, 1], "b": [0, 1]},
            "free": []
        }));
        assert!(matches!(e, Err(Error::ConfigError(_))));
    }

    #[test]
    fn underdetermined_specs_are_rejected() {
        let e = ConstraintSystem::from_json(&json!({
            "family": "t47-c1-w1", "fix": {"tau": [0, 0]}, "free": ["sigma"]
        }));
        assert!(matches!(e, Err(Error::ConfigError(_))));
        let e = ConstraintSystem::from_json(&json!({
            "family": "ms", "fix": {"a": [-1, 0], "t": [0, 0]}, "free": ["sigma"]
        }));
        assert!(matches!(e, Err(Error::ConfigError(_))));
    }

    #[test]
    fn barrier_rejects_invalid_points() {
        let s = ConstraintSystem::from_json(&json!({
            "family": "case2-w1", "free": ["tau", "u"]
        }))
        .unwrap();
        assert!(s.residual(&[0.3, 0.1, 0.05, 0.0]).is_err());
        assert_eq!(s.residual(&[0.3, 0.1, 0.5, 0.0]).unwrap().len(), 3);
        // sigma = tau violates distinctness
        let s = ConstraintSystem::from_json(&json!({
            "family": "t47-c1-w1", "fix": {"tau": [0, 0], "theta": [1, 0], "b": [1, 1]}, "free": ["sigma"]
        }))
        .unwrap();
        assert!(s.residual(&[0.0, 0.0]).is_err());
    }
}
