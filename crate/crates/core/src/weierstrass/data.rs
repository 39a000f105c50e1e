use num_complex::Complex64;
use serde_json::{json, Value};

use crate::algebra::json::{exact_point_to_json, map_from_json, map_to_json, point_from_json};
use crate::algebra::{roots, value_distance, ExactComplex, RationalMap, Scalar, SpherePoint, ROOT_TOL};
use crate::error::{Error, Result};
use crate::sphere::{MoebiusMap, PuncturedSphere};

/// Relative distance at which two located points are considered equal.
pub(crate) const POINT_TOL: f64 = 1e-7;

/// Order of a function at a point; `∞` uses the chart `w = 1/z`.
pub fn function_order<S: Scalar>(r: &RationalMap<S>, p: &SpherePoint<S>) -> i64 {
    match p {
        SpherePoint::Infinity => {
            r.den().degree().unwrap() as i64 - r.num().cleaned().degree().unwrap_or(0) as i64
        }
        SpherePoint::Finite(a) => r.num().order_at(a) as i64 - r.den().order_at(a) as i64,
    }
}

/// Zeros (positive) and poles (negative) of `r` in the finite plane.
pub fn finite_divisor<S: Scalar>(r: &RationalMap<S>) -> Result<Vec<(Complex64, i64)>> {
    let mut out: Vec<(Complex64, i64)> = Vec::new();
    let mut add = |z: Complex64, k: i64| {
        let here = SpherePoint::Finite(z);
        match out
            .iter_mut()
            .find(|(w, _)| value_distance(&SpherePoint::Finite(*w), &here) <= POINT_TOL)
        {
            Some(e) => e.1 += k,
            None => out.push((z, k)),
        }
    };
    let num = r.num().cleaned();
    if num.degree().unwrap_or(0) > 0 {
        for c in roots(&num, ROOT_TOL)? {
            add(c.center(), c.multiplicity as i64);
        }
    }
    if r.den().degree().unwrap() > 0 {
        for c in roots(r.den(), ROOT_TOL)? {
            add(c.center(), -(c.multiplicity as i64));
        }
    }
    out.retain(|e| e.1 != 0);
    Ok(out)
}

/// `h(z) dz` in the affine chart.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm<S: Scalar> {
    pub h: RationalMap<S>,
}

impl<S: Scalar> OneForm<S> {
    pub fn new(h: RationalMap<S>) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::InvalidData("the 1-form vanishes identically".into()));
        }
        Ok(OneForm { h })
    }

    /// Order of the form; at `∞` this is the order of `-h(1/w) w⁻²`.
    pub fn order_at(&self, p: &SpherePoint<S>) -> i64 {
        let k = function_order(&self.h, p);
        if p.is_infinite() {
            k - 2
        } else {
            k
        }
    }

    /// `M* ω = h(M(z)) M'(z) dz`.
    pub fn pullback(&self, m: &MoebiusMap<S>) -> Result<Self> {
        let h = m.pullback(&self.h)?.mul(&m.derivative());
        OneForm::new(h)
    }

    pub fn to_c64(&self) -> OneForm<Complex64> {
        OneForm { h: self.h.to_c64() }
    }
}

/// A Gauss map and height form on a punctured sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData<S: Scalar> {
    pub g: RationalMap<S>,
    pub omega: OneForm<S>,
    pub dom: PuncturedSphere<S>,
}

impl<S: Scalar> WeierstrassData<S> {
    /// Checks that `g` is nonconstant and `ω` has no poles off the punctures.
    pub fn new(g: RationalMap<S>, omega: OneForm<S>, dom: PuncturedSphere<S>) -> Result<Self> {
        if g.is_constant() {
            return Err(Error::ConstantMap);
        }
        let pc = dom.to_c64();
        for (z, k) in finite_divisor(&omega.h)? {
            let p = SpherePoint::Finite(z);
            if k < 0 && pc.find_c64(&p, POINT_TOL).is_none() {
                return Err(Error::InvalidData(format!(
                    "ω has a pole at {p} inside the domain"
                )));
            }
        }
        if omega.order_at(&SpherePoint::Infinity) < 0 && !dom.contains_puncture(&SpherePoint::Infinity) {
            return Err(Error::InvalidData("ω has a pole at ∞ inside the domain".into()));
        }
        Ok(WeierstrassData { g, omega, dom })
    }

    pub fn h(&self) -> &RationalMap<S> {
        &self.omega.h
    }

    /// Data in the coordinate `z = M(w)`; punctures move to `M⁻¹(p)`.
    pub fn pullback(&self, m: &MoebiusMap<S>) -> Result<Self> {
        let inv = m.inverse();
        let punct = self.dom.punctures().iter().map(|p| inv.apply(p)).collect();
        WeierstrassData::new(
            m.pullback(&self.g)?,
            self.omega.pullback(m)?,
            PuncturedSphere::new(punct)?,
        )
    }

    pub fn to_c64(&self) -> WeierstrassData<Complex64> {
        WeierstrassData {
            g: self.g.to_c64(),
            omega: self.omega.to_c64(),
            dom: self.dom.to_c64(),
        }
    }
}

impl WeierstrassData<ExactComplex> {
    /// `{"g": map, "omega": map, "punctures": [points]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Parse(format!("Weierstrass data lacks \"{k}\"")))
        };
        let g = map_from_json(field("g")?)?;
        let h = map_from_json(field("omega")?)?;
        let punct = match field("punctures")? {
            Value::Array(a) => a.iter().map(point_from_json).collect::<Result<Vec<_>>>()?,
            other => return Err(Error::Parse(format!("punctures must be a list, got {other}"))),
        };
        WeierstrassData::new(g, OneForm::new(h)?, PuncturedSphere::new(punct)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "g": map_to_json(&self.g),
            "omega": map_to_json(&self.omega.h),
            "punctures": self.dom.punctures().iter().map(exact_point_to_json).collect::<Vec<_>>(),
        })
    }
}
