use serde::Serialize;

use super::build::{build, family_domain};
use super::params::ParamSet;
use super::FamilyId;
use crate::algebra::{value_distance, ExactComplex, RationalMap, SpherePoint, ROOT_TOL};
use crate::error::{Error, Result};
use crate::sphere::{
    classify_allocation, cross_ratio, fiber, point_label, ramification_profile, tr_report, AllocationPattern,
    PuncturedSphere, VALUE_TOL,
};

type E = ExactComplex;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalClause {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalReport {
    pub id: FamilyId,
    pub degree: usize,
    pub omitted: Vec<String>,
    pub allocation: Option<AllocationPattern>,
    /// The cross ratio of the four ends in the order fixed by their roles.
    pub cross_ratio: String,
    pub clauses: Vec<CanonicalClause>,
}

fn pt(re: i64, im: i64) -> SpherePoint<E> {
    SpherePoint::Finite(E::from_ints(re, im))
}

/// Fiber of `v` as `(end, multiplicity)`, or the first point off the ends.
fn end_fiber(
    g: &RationalMap<E>,
    dom: &PuncturedSphere<E>,
    v: &SpherePoint<E>,
) -> std::result::Result<Vec<(SpherePoint<E>, usize)>, String> {
    let mut out = Vec::new();
    for (p, m) in fiber(g, v, ROOT_TOL).map_err(|e| e.to_string())? {
        match dom.to_c64().find_c64(&p, 1e-7) {
            Some(i) => out.push((dom.punctures()[i].clone(), m)),
            None => return Err(format!("{p} with multiplicity {m} is not an end")),
        }
    }
    Ok(out)
}

fn fiber_text(f: &[(SpherePoint<num_complex::Complex64>, usize)]) -> String {
    let parts: Vec<String> = f
        .iter()
        .map(|(p, m)| format!("{} x{m}", point_label(p)))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn with_mult(f: &[(SpherePoint<E>, usize)], m: usize) -> Vec<SpherePoint<E>> {
    f.iter().filter(|e| e.1 == m).map(|e| e.0.clone()).collect()
}

/// The ends in the order `[p, q; r, s]` used by the cross-ratio condition of each case.
fn role_points(
    id: FamilyId,
    g: &RationalMap<E>,
    dom: &PuncturedSphere<E>,
) -> std::result::Result<[SpherePoint<E>; 4], String> {
    if id == FamilyId::CanonGd1 {
        return Ok([SpherePoint::Infinity, pt(0, 0), pt(0, 1), pt(0, -1)]);
    }
    let zero = end_fiber(g, dom, &pt(0, 0))?;
    let one = end_fiber(g, dom, &pt(1, 0))?;
    let take = |v: Vec<SpherePoint<E>>, n: usize, what: &str| {
        if v.len() == n {
            Ok(v)
        } else {
            Err(format!("expected {n} {what}, found {}", v.len()))
        }
    };
    match id {
        FamilyId::CanonG111 => {
            let p0 = take(with_mult(&zero, 4), 1, "quadruple zero")?;
            let p1 = take(with_mult(&one, 2), 1, "double 1-point")?;
            let s = take(with_mult(&one, 1), 2, "simple 1-points")?;
            Ok([p0[0].clone(), p1[0].clone(), s[0].clone(), s[1].clone()])
        }
        FamilyId::CanonG211 => {
            let p3 = take(with_mult(&zero, 3), 1, "triple zero")?;
            let p1 = take(with_mult(&zero, 1), 1, "simple zero")?;
            let s3 = take(with_mult(&one, 3), 1, "triple 1-point")?;
            let s1 = take(with_mult(&one, 1), 1, "simple 1-point")?;
            Ok([p3[0].clone(), p1[0].clone(), s3[0].clone(), s1[0].clone()])
        }
        _ => {
            let z = take(with_mult(&zero, 2), 2, "double zeros")?;
            let w = take(with_mult(&one, 2), 2, "double 1-points")?;
            Ok([z[0].clone(), z[1].clone(), w[0].clone(), w[1].clone()])
        }
    }
}

/// Structural checks of a canonical quartic on its fixed domain.
pub fn verify_canonical(id: FamilyId) -> Result<CanonicalReport> {
    if !id.is_canonical() {
        return Err(Error::Unsupported(format!("{id} is not a canonical map")));
    }
    let g = build::<E>(id, &ParamSet::new())?.g;
    let dom = family_domain::<E>(id);
    let mut clauses = Vec::new();
    let mut clause = |name: &str, holds: bool, detail: String| {
        clauses.push(CanonicalClause {
            name: name.to_string(),
            holds,
            detail,
        })
    };

    clause("deg G = 4", g.degree() == 4, format!("degree {}", g.degree()));

    let tr = tr_report(&g, &dom, VALUE_TOL)?;
    let want: Vec<SpherePoint<E>> = if id == FamilyId::CanonGd1 {
        vec![pt(1, 0)]
    } else {
        vec![pt(0, 0), pt(1, 0)]
    };
    let omitted: Vec<String> = tr.omitted.iter().map(|o| point_label(&o.value)).collect();
    let same = tr.omitted.len() == want.len() && want.iter().all(|w| tr.is_omitted(&w.to_c64(), VALUE_TOL));
    clause("omitted values", same, format!("{omitted:?}"));

    let poles = fiber(&g, &SpherePoint::Infinity, ROOT_TOL)?;
    let pc = dom.to_c64();
    let (ok, detail) = if id == FamilyId::CanonGd1 {
        let zeros = fiber(&g, &pt(0, 0), ROOT_TOL)?;
        let single = |f: &[(SpherePoint<num_complex::Complex64>, usize)], at: i64| {
            f.len() == 1 && f[0].1 == 4 && value_distance(&f[0].0, &pt(at, 0).to_c64()) <= 1e-7
        };
        (
            single(&poles, -1) && single(&zeros, 1),
            format!("poles {}, zeros {}", fiber_text(&poles), fiber_text(&zeros)),
        )
    } else {
        let off_ends = poles.iter().all(|(p, _)| pc.find_c64(p, 1e-7).is_none());
        (
            poles.len() == 2 && poles.iter().all(|e| e.1 == 2) && off_ends,
            fiber_text(&poles),
        )
    };
    clause("pole fiber", ok, detail);

    let mut allocation = None;
    if id == FamilyId::CanonGd1 {
        let ones = end_fiber(&g, &dom, &pt(1, 0));
        let ok = matches!(&ones, Ok(f) if f.len() == 4 && f.iter().all(|e| e.1 == 1));
        clause("fiber of 1 is the four ends", ok, format!("{ones:?}"));
        let prof = ramification_profile(&g)?;
        let ok = prof.branch_points.len() == 2
            && prof.branch_points.iter().all(|b| b.multiplicity == 4)
            && [-1, 1].iter().all(|&x| {
                prof.branch_points
                    .iter()
                    .any(|b| value_distance(&b.point, &pt(x, 0).to_c64()) <= 1e-7)
            });
        clause(
            "branching only at 1 and -1",
            ok,
            format!("{:?}", prof.branch_points),
        );
    } else {
        let want_case = match id {
            FamilyId::CanonG111 => 1,
            FamilyId::CanonG211 => 2,
            _ => 4,
        };
        match classify_allocation(&g, &dom, &[pt(0, 0), pt(1, 0)]) {
            Ok(a) => {
                clause(
                    "allocation case",
                    a.case.number() == Some(want_case),
                    format!("{:?}", a.entries),
                );
                allocation = Some(a);
            }
            Err(e) => clause("allocation case", false, e.to_string()),
        }
    }

    let expected_cr = match id {
        FamilyId::CanonG211 => pt(9, 0),
        _ => pt(-1, 0),
    };
    let cr_text = match role_points(id, &g, &dom) {
        Ok([a, b, c, d]) => {
            let cr = cross_ratio(&a, &b, &c, &d)?;
            let text = point_label(&cr);
            clause(
                "cross ratio",
                cr == expected_cr,
                format!(
                    "[{}, {}; {}, {}] = {}",
                    point_label(&a),
                    point_label(&b),
                    point_label(&c),
                    point_label(&d),
                    text
                ),
            );
            text
        }
        Err(e) => {
            clause("cross ratio", false, e.clone());
            e
        }
    };

    if let Some(bad) = clauses.iter().find(|c| !c.holds) {
        return Err(Error::StructuralViolation(format!(
            "{}: {}",
            bad.name, bad.detail
        )));
    }
    Ok(CanonicalReport {
        id,
        degree: g.degree(),
        omitted,
        allocation,
        cross_ratio: cr_text,
        clauses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_four_canonical_maps_pass() {
        for id in [
            FamilyId::CanonG111,
            FamilyId::CanonG211,
            FamilyId::CanonG42,
            FamilyId::CanonGd1,
        ] {
            let r = verify_canonical(id).unwrap();
            assert_eq!(r.degree, 4);
            assert!(r.clauses.iter().all(|c| c.holds));
            let want = if id == FamilyId::CanonG211 { "9" } else { "-1" };
            assert_eq!(r.cross_ratio, want, "{id}");
        }
    }

    #[test]
    fn g111_pattern_and_roles() {
        let r = verify_canonical(FamilyId::CanonG111).unwrap();
        let a = serde_json::to_value(r.allocation.unwrap()).unwrap();
        assert_eq!(a, serde_json::json!({"0": [4], "1": [2, 1, 1]}));
        let cr = r.clauses.iter().find(|c| c.name == "cross ratio").unwrap();
        assert!(cr.detail.starts_with("[inf, 0;"), "{}", cr.detail);
    }

    #[test]
    fn g211_simple_one_point_is_minus_17i() {
        let g = build::<E>(FamilyId::CanonG211, &ParamSet::new()).unwrap().g;
        let dom = family_domain::<E>(FamilyId::CanonG211);
        let f = end_fiber(&g, &dom, &pt(1, 0)).unwrap();
        assert!(f.contains(&(pt(0, -17), 1)));
        assert!(f.contains(&(pt(0, -1), 3)));
    }

    #[test]
    fn non_canonical_ids_are_rejected() {
        assert!(matches!(
            verify_canonical(FamilyId::Ms),
            Err(Error::Unsupported(_))
        ));
    }
}
