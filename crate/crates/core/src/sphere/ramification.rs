use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{roots, RationalMap, Scalar, SpherePoint, ROOT_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    pub point: SpherePoint<Complex64>,
    pub multiplicity: usize,
    pub value: SpherePoint<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamificationProfile {
    pub degree: usize,
    pub branch_points: Vec<BranchPoint>,
    pub total_branching: usize,
}

/// Wronskian with cancelled leading terms removed.
fn wronskian<S: Scalar>(g: &RationalMap<S>) -> crate::algebra::Poly<S> {
    g.wronskian().cleaned()
}

/// Local degree of `g` at `p`: the order of `g - g(p)` there.
pub fn multiplicity_at<S: Scalar>(g: &RationalMap<S>, p: &SpherePoint<S>) -> Result<usize> {
    let d = g.degree();
    if d == 0 {
        return Err(Error::ConstantMap);
    }
    let w = wronskian(g);
    match p {
        // W̃(w) = -w^(2d-2) W(1/w) in the chart at ∞.
        SpherePoint::Infinity => Ok(2 * d - 1 - w.degree().unwrap_or(0)),
        SpherePoint::Finite(a) => Ok(1 + w.order_at(a)),
    }
}

pub fn ramification_profile<S: Scalar>(g: &RationalMap<S>) -> Result<RamificationProfile> {
    let d = g.degree();
    if d == 0 {
        return Err(Error::ConstantMap);
    }
    let w = wronskian(g);
    let deg_w = w.degree().ok_or(Error::ConstantMap)?;
    let mut branch_points = Vec::new();
    if deg_w > 0 {
        for cl in roots(&w, ROOT_TOL)? {
            let value = g.eval_c64(&cl.location);
            branch_points.push(BranchPoint {
                point: cl.location,
                multiplicity: cl.multiplicity + 1,
                value,
            });
        }
    }
    let e_inf = 2 * d - 1 - deg_w;
    if e_inf >= 2 {
        branch_points.push(BranchPoint {
            point: SpherePoint::Infinity,
            multiplicity: e_inf,
            value: g.eval_c64(&SpherePoint::Infinity),
        });
    }
    let total_branching = branch_points.iter().map(|b| b.multiplicity - 1).sum();
    if total_branching != 2 * d - 2 {
        return Err(Error::ConvergenceFailure(format!(
            "branching {total_branching} violates Riemann-Hurwitz for degree {d}"
        )));
    }
    Ok(RamificationProfile {
        degree: d,
        branch_points,
        total_branching,
    })
}

/// Preimage of `v` with multiplicities; ∞ is included when the degree of
/// `num - v·den` drops below `deg g`.
pub fn fiber<S: Scalar>(
    g: &RationalMap<S>,
    v: &SpherePoint<S>,
    tol: f64,
) -> Result<Vec<(SpherePoint<Complex64>, usize)>> {
    let d = g.degree();
    if d == 0 {
        return Err(Error::ConstantMap);
    }
    let p = match v {
        SpherePoint::Infinity => g.den().clone(),
        SpherePoint::Finite(c) => (g.num() - &g.den().scale(c)).cleaned(),
    };
    let deg = p.degree().ok_or(Error::ConstantMap)?;
    let mut out = Vec::new();
    if deg > 0 {
        for cl in roots(&p, tol)? {
            out.push((cl.location, cl.multiplicity));
        }
    }
    if deg < d {
        out.push((SpherePoint::Infinity, d - deg));
    }
    Ok(out)
}
