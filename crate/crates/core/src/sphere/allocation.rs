use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::ramification::fiber;
use super::report::PuncturedSphere;
use crate::algebra::{value_distance, RationalMap, Scalar, SpherePoint, ROOT_TOL};
use crate::error::{Error, Result};

/// Relative distance within which a fiber point counts as a puncture.
const PUNCTURE_MATCH_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AllocationCase {
    Case1,
    Case2,
    Case3,
    Case4,
    Unclassified,
}

impl AllocationCase {
    pub fn number(self) -> Option<u8> {
        match self {
            AllocationCase::Case1 => Some(1),
            AllocationCase::Case2 => Some(2),
            AllocationCase::Case3 => Some(3),
            AllocationCase::Case4 => Some(4),
            AllocationCase::Unclassified => None,
        }
    }
}

/// Multiplicities of a map at the punctures over each listed value.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationPattern {
    /// `(label, bracket)` in input order; brackets sorted descending.
    pub entries: Vec<(String, Vec<usize>)>,
    pub case: AllocationCase,
}

impl Serialize for AllocationPattern {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let m: BTreeMap<&str, &Vec<usize>> = self.entries.iter().map(|(k, v)| (k.as_str(), v)).collect();
        m.serialize(s)
    }
}

impl AllocationPattern {
    pub fn brackets(&self) -> Vec<&[usize]> {
        self.entries.iter().map(|(_, b)| b.as_slice()).collect()
    }
}

pub fn point_label<S: Scalar>(p: &SpherePoint<S>) -> String {
    match p {
        SpherePoint::Infinity => "inf".into(),
        SpherePoint::Finite(z) if S::EXACT => format!("{z:?}"),
        SpherePoint::Finite(z) => float_label(z.to_c64()),
    }
}

/// `a+bi` with 12 decimals, dropping parts below 1e-12 relative.
fn float_label(z: num_complex::Complex64) -> String {
    let cut = 1e-12 * (1.0 + z.norm());
    let part = |x: f64| {
        let x = if x.abs() < cut {
            0.0
        } else {
            (x * 1e12).round() / 1e12
        };
        let s = format!("{x}");
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    };
    let (re, im) = (part(z.re), part(z.im));
    let unit = |s: &str| match s {
        "1" => String::new(),
        "-1" => "-".to_string(),
        other => other.to_string(),
    };
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", _) => format!("{}i", unit(&im)),
        _ if im.starts_with('-') => format!("{re}-{}i", unit(&im[1..])),
        _ => format!("{re}+{}i", unit(&im)),
    }
}

/// Case of a pair of brackets for two omitted values of a degree-4 map.
pub fn case_of(brackets: &[&[usize]]) -> AllocationCase {
    if brackets.len() != 2 {
        return AllocationCase::Unclassified;
    }
    let mut pair = [brackets[0], brackets[1]];
    pair.sort();
    match (pair[0], pair[1]) {
        ([2, 1, 1], [4]) => AllocationCase::Case1,
        ([3, 1], [3, 1]) => AllocationCase::Case2,
        ([2, 2], [3, 1]) => AllocationCase::Case3,
        ([2, 2], [2, 2]) => AllocationCase::Case4,
        _ => AllocationCase::Unclassified,
    }
}

/// Brackets of `g` over `values`, each of which must be omitted on `dom`.
pub fn classify_allocation<S: Scalar>(
    g: &RationalMap<S>,
    dom: &PuncturedSphere<S>,
    values: &[SpherePoint<S>],
) -> Result<AllocationPattern> {
    let pc = dom.to_c64();
    let mut entries = Vec::new();
    for v in values {
        let mut bracket = Vec::new();
        for (p, m) in fiber(g, v, ROOT_TOL)? {
            let hit = pc
                .punctures()
                .iter()
                .any(|q| value_distance(q, &p) <= PUNCTURE_MATCH_TOL);
            if !hit {
                return Err(Error::NotOmitted {
                    value: point_label(v),
                    witness: p.to_string(),
                });
            }
            bracket.push(m);
        }
        bracket.sort_unstable_by(|a, b| b.cmp(a));
        entries.push((point_label(v), bracket));
    }
    let case = if g.degree() == 4 {
        case_of(&entries.iter().map(|(_, b)| b.as_slice()).collect::<Vec<_>>())
    } else {
        AllocationCase::Unclassified
    };
    Ok(AllocationPattern { entries, case })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ExactComplex as E, Poly};

    fn ep(v: &[(i64, i64)]) -> Poly<E> {
        Poly::new(v.iter().map(|&(a, b)| E::from_ints(a, b)).collect())
    }

    fn f(re: i64, im: i64) -> SpherePoint<E> {
        SpherePoint::Finite(E::from_ints(re, im))
    }

    #[test]
    fn float_labels() {
        use num_complex::Complex64 as C;
        let l = |re, im| point_label(&SpherePoint::Finite(C::new(re, im)));
        assert_eq!(l(0.0, 1.0), "i");
        assert_eq!(l(1e-40, -1.0), "-i");
        assert_eq!(l(0.5, -2.0), "0.5-2i");
        assert_eq!(l(-3.0, 1.0), "-3+i");
        assert_eq!(l(0.0, 0.0), "0");
        assert_eq!(point_label(&f(0, -17)), "-17i");
    }

    #[test]
    fn case_table() {
        assert_eq!(case_of(&[&[4], &[2, 1, 1]]), AllocationCase::Case1);
        assert_eq!(case_of(&[&[2, 1, 1], &[4]]), AllocationCase::Case1);
        assert_eq!(case_of(&[&[3, 1], &[3, 1]]), AllocationCase::Case2);
        assert_eq!(case_of(&[&[2, 2], &[3, 1]]), AllocationCase::Case3);
        assert_eq!(case_of(&[&[2, 2], &[2, 2]]), AllocationCase::Case4);
        assert_eq!(case_of(&[&[4], &[4]]), AllocationCase::Unclassified);
        assert_eq!(case_of(&[&[4]]), AllocationCase::Unclassified);
    }

    #[test]
    fn z2_case_four_shape() {
        // -4z²/(z² - 1)²: 0 over {0, ∞}, 1 over {±i}
        let g = RationalMap::new(
            ep(&[(0, 0), (0, 0), (-4, 0)]),
            ep(&[(-1, 0), (0, 0), (1, 0)]).pow(2),
        )
        .unwrap();
        let dom = PuncturedSphere::new(vec![SpherePoint::Infinity, f(0, 1), f(0, -1), f(0, 0)]).unwrap();
        let p = classify_allocation(&g, &dom, &[f(0, 0), f(1, 0)]).unwrap();
        assert_eq!(p.case, AllocationCase::Case4);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"0":[2,2],"1":[2,2]}"#);
    }

    #[test]
    fn value_attained_inside_is_reported() {
        let g: RationalMap<E> = RationalMap::from_poly(Poly::monomial(E::one(), 2));
        let dom = PuncturedSphere::new(vec![f(1, 0)]).unwrap();
        match classify_allocation(&g, &dom, &[f(1, 0)]) {
            Err(Error::NotOmitted { value, .. }) => assert_eq!(value, "1"),
            other => panic!("{other:?}"),
        }
    }
}
