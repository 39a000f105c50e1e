use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use super::mobius::same_point;
use super::ramification::{multiplicity_at, ramification_profile};
use crate::algebra::{value_distance, RationalMap, Scalar, SpherePoint};
use crate::error::{Error, Result};

/// Default tolerance for identifying two numeric values of a map.
pub const VALUE_TOL: f64 = 1e-9;

/// Relative distance within which a branch point is matched to a puncture.
const POINT_MATCH_TOL: f64 = 1e-6;

pub(crate) fn ser_ratio<Z: Serializer>(r: &Ratio<i64>, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    if *r.denom() == 1 {
        s.serialize_str(&r.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }
}

/// The Riemann sphere with finitely many points removed.
#[derive(Clone, PartialEq)]
pub struct PuncturedSphere<S> {
    punctures: Vec<SpherePoint<S>>,
}

impl<S: Scalar> std::fmt::Debug for PuncturedSphere<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.punctures).finish()
    }
}

impl<S: Scalar> PuncturedSphere<S> {
    pub fn new(punctures: Vec<SpherePoint<S>>) -> Result<Self> {
        for (i, p) in punctures.iter().enumerate() {
            for q in &punctures[..i] {
                let clash = if S::EXACT {
                    p == q
                } else {
                    value_distance(&p.to_c64(), &q.to_c64()) <= 10.0 * VALUE_TOL
                };
                if clash {
                    return Err(Error::Degenerate(format!("repeated puncture {p}")));
                }
            }
        }
        Ok(PuncturedSphere { punctures })
    }

    pub fn sphere() -> Self {
        PuncturedSphere {
            punctures: Vec::new(),
        }
    }

    pub fn punctures(&self) -> &[SpherePoint<S>] {
        &self.punctures
    }

    pub fn len(&self) -> usize {
        self.punctures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.punctures.is_empty()
    }

    pub fn contains_puncture(&self, p: &SpherePoint<S>) -> bool {
        self.punctures.iter().any(|q| same_point(p, q))
    }

    /// Index of the puncture at a numeric location, if any.
    pub fn find_c64(&self, p: &SpherePoint<Complex64>, tol: f64) -> Option<usize> {
        self.punctures
            .iter()
            .position(|q| value_distance(&q.to_c64(), p) <= tol)
    }

    pub fn to_c64(&self) -> PuncturedSphere<Complex64> {
        PuncturedSphere {
            punctures: self.punctures.iter().map(|p| p.to_c64()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberPoint {
    pub point: SpherePoint<Complex64>,
    pub multiplicity: usize,
    pub puncture: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmittedValue {
    pub value: SpherePoint<Complex64>,
    /// The whole fiber, all of it at punctures.
    pub fiber: Vec<FiberPoint>,
    /// Values at the punctures agree exactly (exact scalars only).
    pub certified_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamifiedValue {
    pub value: SpherePoint<Complex64>,
    /// Minimal multiplicity over the fiber points inside the punctured sphere.
    pub order: usize,
    pub fiber: Vec<FiberPoint>,
    /// `Σ (e_p - 1)` over the whole fiber, punctures included.
    pub fiber_branching: usize,
    pub punctures_in_fiber: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TotallyRamifiedReport {
    pub degree: usize,
    pub total_branching: usize,
    pub n_punctures: usize,
    pub omitted: Vec<OmittedValue>,
    pub ramified: Vec<RamifiedValue>,
    pub d_g: usize,
    pub r_g: usize,
    pub s_g: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub nu_g: Ratio<i64>,
}

impl TotallyRamifiedReport {
    pub fn orders(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.ramified.iter().map(|r| r.order).collect();
        v.sort_unstable();
        v
    }

    /// Order of the ramified value nearest to `v`, if within `tol`.
    pub fn order_of(&self, v: &SpherePoint<Complex64>, tol: f64) -> Option<usize> {
        self.ramified
            .iter()
            .find(|r| value_distance(&r.value, v) <= tol)
            .map(|r| r.order)
    }

    pub fn is_omitted(&self, v: &SpherePoint<Complex64>, tol: f64) -> bool {
        self.omitted.iter().any(|o| value_distance(&o.value, v) <= tol)
    }
}

struct Candidate<S> {
    point: SpherePoint<Complex64>,
    exact_point: Option<SpherePoint<S>>,
    value: SpherePoint<Complex64>,
    e: usize,
    puncture: bool,
}

fn sort_key(p: &SpherePoint<Complex64>) -> (u8, f64, f64) {
    match p {
        SpherePoint::Finite(z) => (0, z.re, z.im),
        SpherePoint::Infinity => (1, 0.0, 0.0),
    }
}

fn cmp_points(a: &SpherePoint<Complex64>, b: &SpherePoint<Complex64>) -> std::cmp::Ordering {
    sort_key(a).partial_cmp(&sort_key(b)).unwrap()
}

/// Omitted and totally ramified values of `g` restricted to `dom`.
///
/// Candidates are critical values and values at punctures. A value whose
/// known fiber (branch points and punctures) already carries multiplicity
/// `deg g` is omitted when every fiber point is a puncture, and ramified of
/// order `min e_p` over the fiber points inside the domain otherwise.
pub fn tr_report<S: Scalar>(
    g: &RationalMap<S>,
    dom: &PuncturedSphere<S>,
    tol: f64,
) -> Result<TotallyRamifiedReport> {
    if !(tol > 0.0) {
        return Err(Error::ConfigError("value tolerance must be positive".into()));
    }
    let prof = ramification_profile(g)?;
    let d = prof.degree;
    let mut cands: Vec<Candidate<S>> = prof
        .branch_points
        .iter()
        .map(|b| Candidate {
            point: b.point.clone(),
            exact_point: None,
            value: b.value.clone(),
            e: b.multiplicity,
            puncture: false,
        })
        .collect();
    for p in dom.punctures() {
        let pc = p.to_c64();
        let e = multiplicity_at(g, p)?;
        if e >= 2 {
            let (k, dist) = cands
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.puncture && c.e == e)
                .map(|(k, c)| (k, value_distance(&c.point, &pc)))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .ok_or_else(|| {
                    Error::ConvergenceFailure(format!("no branch point of order {e} at puncture {pc}"))
                })?;
            if dist > POINT_MATCH_TOL {
                return Err(Error::ConvergenceFailure(format!(
                    "branch point near puncture {pc} is {dist:e} away"
                )));
            }
            let c = &mut cands[k];
            c.puncture = true;
            c.point = pc;
            c.exact_point = Some(p.clone());
            c.value = g.eval(p).to_c64();
        } else {
            cands.push(Candidate {
                point: pc,
                exact_point: Some(p.clone()),
                value: g.eval(p).to_c64(),
                e: 1,
                puncture: true,
            });
        }
    }

    // Group by value.
    let n = cands.len();
    let mut group: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            let dist = value_distance(&cands[i].value, &cands[j].value);
            if dist < tol {
                let gj = group[j];
                let gi = group[i];
                for x in group.iter_mut() {
                    if *x == gi {
                        *x = gj;
                    }
                }
            } else if dist < 10.0 * tol {
                return Err(Error::TolTooCoarse {
                    a: cands[i].value.to_string(),
                    b: cands[j].value.to_string(),
                    distance: dist,
                    tol,
                });
            }
        }
    }

    let mut omitted = Vec::new();
    let mut ramified = Vec::new();
    let mut leaders: Vec<usize> = group.clone();
    leaders.sort_unstable();
    leaders.dedup();
    for lead in leaders {
        let members: Vec<&Candidate<S>> = (0..n).filter(|&i| group[i] == lead).map(|i| &cands[i]).collect();
        let total: usize = members.iter().map(|c| c.e).sum();
        if total > d {
            return Err(Error::ConvergenceFailure(format!(
                "fiber of {} carries multiplicity {total} > degree {d}",
                members[0].value
            )));
        }
        if total < d {
            continue;
        }
        let mut fiber: Vec<FiberPoint> = members
            .iter()
            .map(|c| FiberPoint {
                point: c.point.clone(),
                multiplicity: c.e,
                puncture: c.puncture,
            })
            .collect();
        fiber.sort_by(|a, b| cmp_points(&a.point, &b.point));
        let value = members
            .iter()
            .find(|c| c.puncture)
            .map(|c| c.value.clone())
            .unwrap_or_else(|| members[0].value.clone());
        let inside: Vec<usize> = members.iter().filter(|c| !c.puncture).map(|c| c.e).collect();
        if inside.is_empty() {
            let certified_exact = S::EXACT && {
                let vals: Vec<SpherePoint<S>> = members
                    .iter()
                    .map(|c| g.eval(c.exact_point.as_ref().unwrap()))
                    .collect();
                vals.windows(2).all(|w| w[0] == w[1])
            };
            omitted.push(OmittedValue {
                value,
                fiber,
                certified_exact,
            });
        } else {
            ramified.push(RamifiedValue {
                value,
                order: *inside.iter().min().unwrap(),
                fiber_branching: members.iter().map(|c| c.e - 1).sum(),
                punctures_in_fiber: members.iter().filter(|c| c.puncture).count(),
                fiber,
            });
        }
    }
    omitted.sort_by(|a, b| cmp_points(&a.value, &b.value));
    ramified.sort_by(|a, b| cmp_points(&a.value, &b.value));
    let d_g = omitted.len();
    let r_g = ramified.len();
    let s_g = ramified.iter().map(|r| r.order).sum();
    let mut nu_g = Ratio::from_integer(d_g as i64);
    for r in &ramified {
        nu_g += Ratio::new(r.order as i64 - 1, r.order as i64);
    }
    Ok(TotallyRamifiedReport {
        degree: d,
        total_branching: prof.total_branching,
        n_punctures: dom.len(),
        omitted,
        ramified,
        d_g,
        r_g,
        s_g,
        nu_g,
    })
}
