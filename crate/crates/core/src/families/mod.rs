//! Named families of Gauss maps and Weierstrass data, their period
//! constraints and closed-form residues, and the canonical quartic maps.

mod build;
mod canonical;
mod expr;
mod formulas;
mod params;

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::algebra::{RationalMap, Scalar};
use crate::error::{Error, Result};
use crate::sphere::{ser_ratio, PuncturedSphere};
use crate::weierstrass::WeierstrassData;

pub use build::{
    build, family_domain, omega_shape, pullback_neg_z, t47_data, variant_equivalences, Equivalence,
    VARIANT_EXPONENTS,
};
pub use canonical::{verify_canonical, CanonicalClause, CanonicalReport};
pub use expr::{parse_expr, Expr};
pub use formulas::{
    case2_residue_triple, obstruction_triple, period_constraints, printed_residue_formulas, residue_formulas,
    ObstructionTriple, ResidueTriple,
};
pub(crate) use params::canonical_name;
pub use params::{exact_example_params, example_params, ParamSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Ms,
    Kw,
    T47C1W1,
    T47C1W2,
    T47C1W5,
    T47C1W8,
    T47C4W5,
    P49W5,
    CanonG111,
    CanonG211,
    CanonG42,
    CanonGd1,
}

impl FamilyId {
    pub const ALL: [FamilyId; 12] = [
        FamilyId::Ms,
        FamilyId::Kw,
        FamilyId::T47C1W1,
        FamilyId::T47C1W2,
        FamilyId::T47C1W5,
        FamilyId::T47C1W8,
        FamilyId::T47C4W5,
        FamilyId::P49W5,
        FamilyId::CanonG111,
        FamilyId::CanonG211,
        FamilyId::CanonG42,
        FamilyId::CanonGd1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Ms => "ms",
            FamilyId::Kw => "kw",
            FamilyId::T47C1W1 => "t47-c1-w1",
            FamilyId::T47C1W2 => "t47-c1-w2",
            FamilyId::T47C1W5 => "t47-c1-w5",
            FamilyId::T47C1W8 => "t47-c1-w8",
            FamilyId::T47C4W5 => "t47-c4-w5",
            FamilyId::P49W5 => "p49-w5",
            FamilyId::CanonG111 => "canon-g111",
            FamilyId::CanonG211 => "canon-g211",
            FamilyId::CanonG42 => "canon-g42",
            FamilyId::CanonGd1 => "canon-gd1",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::Ms => &["a", "t", "sigma"],
            FamilyId::Kw => &["a", "b", "sigma"],
            FamilyId::P49W5 => &["sigma", "b1", "b2", "theta"],
            id if id.is_canonical() => &[],
            _ => &["sigma", "tau", "b", "theta"],
        }
    }

    pub fn is_canonical(self) -> bool {
        matches!(
            self,
            FamilyId::CanonG111 | FamilyId::CanonG211 | FamilyId::CanonG42 | FamilyId::CanonGd1
        )
    }

    /// Families whose periods reduce to a displayed list of real constraints.
    pub fn is_period_constrained(self) -> bool {
        !self.is_canonical() && !matches!(self, FamilyId::Ms | FamilyId::Kw)
    }

    /// `(case, ω variant)` for the four-ended families.
    pub fn case_variant(self) -> Option<(u8, u8)> {
        match self {
            FamilyId::T47C1W1 => Some((1, 1)),
            FamilyId::T47C1W2 => Some((1, 2)),
            FamilyId::T47C1W5 => Some((1, 5)),
            FamilyId::T47C1W8 => Some((1, 8)),
            FamilyId::T47C4W5 => Some((4, 5)),
            FamilyId::P49W5 => Some((0, 5)),
            _ => None,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FamilyId::Ms => "two-parameter family on the sphere minus {i, -i, inf}, total curvature -8pi",
            FamilyId::Kw => "two-parameter family on the sphere minus {0, i, -i, inf}, total curvature -16pi",
            FamilyId::T47C1W1 => "allocation case 1, omega variant (1)",
            FamilyId::T47C1W2 => "allocation case 1, omega variant (2)",
            FamilyId::T47C1W5 => "allocation case 1, omega variant (5)",
            FamilyId::T47C1W8 => "allocation case 1, omega variant (8)",
            FamilyId::T47C4W5 => "allocation case 4, omega variant (5)",
            FamilyId::P49W5 => "one omitted value and two quadruple values, omega variant (5)",
            FamilyId::CanonG111 => "G = 1/(2z^2+1)^2 on the sphere minus {inf, i, -i, 0}",
            FamilyId::CanonG211 => "G = 512i(z-i)/(z^2+10iz+23)^2 on the sphere minus {inf, i, -i, -17i}",
            FamilyId::CanonG42 => "G = -4z^2/(z^2-1)^2 on the sphere minus {inf, i, -i, 0}",
            FamilyId::CanonGd1 => "G = ((z-1)/(z+1))^4 on the sphere minus {inf, i, -i, 0}",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        FamilyId::ALL
            .into_iter()
            .find(|id| id.as_str() == key)
            .ok_or_else(|| Error::Parse(format!("unknown family \"{s}\"")))
    }
}

impl Serialize for FamilyId {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Invariants a correctly built instance must reproduce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub d_g: usize,
    pub r_g: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub nu_g: Ratio<i64>,
    /// Total curvature in units of π.
    pub curvature_pi: i64,
    /// Orders of the ramified values, ascending.
    pub orders: Vec<usize>,
}

impl Expected {
    pub fn of(id: FamilyId) -> Option<Expected> {
        let e = |d_g, r_g, c, orders: Vec<usize>| Expected {
            d_g,
            r_g,
            nu_g: Ratio::new(5, 2),
            curvature_pi: c,
            orders,
        };
        match id {
            FamilyId::Ms => Some(e(2, 1, -8, vec![2])),
            FamilyId::P49W5 => Some(e(1, 2, -16, vec![4, 4])),
            id if id.is_canonical() => None,
            _ => Some(e(2, 1, -16, vec![2])),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyInstance<S: Scalar> {
    pub id: FamilyId,
    pub params: ParamSet<S>,
    pub g: RationalMap<S>,
    pub dom: PuncturedSphere<S>,
    /// `None` for the canonical maps, which carry no height form.
    pub data: Option<WeierstrassData<S>>,
    pub expected: Option<Expected>,
}
