use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::algebra::{ResidueConfig, ResidueMode, Scalar, SpherePoint};
use crate::error::{Error, Result};
use crate::families::{build, Expected, FamilyId, ParamSet};
use crate::sphere::{check_bounds, ser_ratio, tr_report, BoundReport, TotallyRamifiedReport, VALUE_TOL};
use crate::weierstrass::{
    period_report, regularity_and_completeness, total_curvature, MetricReport, PeriodEntry, PeriodReport,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observed {
    pub d_g: usize,
    pub r_g: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub nu_g: Ratio<i64>,
    pub curvature_pi: i64,
    pub orders: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    pub holds: bool,
}

/// Every sub-verdict of a full check of one family instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub family: FamilyId,
    pub params: serde_json::Value,
    pub periods: PeriodReport,
    /// Ends with a residue whose imaginary part exceeds the tolerance.
    pub failing_residues: Vec<PeriodEntry>,
    pub metric: MetricReport,
    pub ramification: TotallyRamifiedReport,
    pub bounds: BoundReport,
    pub expected: Expected,
    pub observed: Observed,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

/// Builds the instance and runs the period, metric, ramification and bound checks.
pub fn verify_solution<S: Scalar>(id: FamilyId, params: &ParamSet<S>, tol: f64) -> Result<Certificate> {
    verify_solution_with(id, params, tol, ResidueMode::Exact, &ResidueConfig::default())
}

/// As [`verify_solution`], with the residue method chosen by the caller.
pub fn verify_solution_with<S: Scalar>(
    id: FamilyId,
    params: &ParamSet<S>,
    tol: f64,
    mode: ResidueMode,
    cfg: &ResidueConfig,
) -> Result<Certificate> {
    let inst = build(id, params)?;
    let (data, expected) = match (inst.data, inst.expected) {
        (Some(d), Some(e)) => (d, e),
        _ => {
            return Err(Error::Unsupported(format!(
                "{id} has no Weierstrass data to verify"
            )))
        }
    };
    let periods = period_report(&data, mode, tol, cfg)?;
    let limit = tol * (1.0 + periods.scale);
    let failing_residues = periods
        .entries
        .iter()
        .filter(|e| e.residues.iter().any(|z| z.im.abs() > limit))
        .cloned()
        .collect();
    let metric = regularity_and_completeness(&data)?;
    let tr = tr_report(&data.g, &data.dom, VALUE_TOL)?;
    let bounds = check_bounds(&tr, 0, data.dom.len());
    let observed = Observed {
        d_g: tr.d_g,
        r_g: tr.r_g,
        nu_g: tr.nu_g,
        curvature_pi: total_curvature(&data),
        orders: tr.orders(),
    };
    let conditional = bounds
        .checks
        .iter()
        .filter(|c| c.applicable && c.hypothesis.is_some())
        .all(|c| c.holds);
    let verdicts = vec![
        Verdict {
            name: "periods",
            holds: periods.passed,
        },
        Verdict {
            name: "regular",
            holds: metric.regular,
        },
        Verdict {
            name: "complete",
            holds: metric.complete,
        },
        Verdict {
            name: "bounds",
            holds: bounds.all_hold,
        },
        Verdict {
            name: "bounds for complete surfaces",
            holds: conditional,
        },
        Verdict {
            name: "D_g",
            holds: observed.d_g == expected.d_g,
        },
        Verdict {
            name: "R_g",
            holds: observed.r_g == expected.r_g,
        },
        Verdict {
            name: "nu_g",
            holds: observed.nu_g == expected.nu_g,
        },
        Verdict {
            name: "orders",
            holds: observed.orders == expected.orders,
        },
        Verdict {
            name: "total curvature",
            holds: observed.curvature_pi == expected.curvature_pi,
        },
    ];
    let passed = verdicts.iter().all(|v| v.holds);
    Ok(Certificate {
        family: id,
        params: params.to_json(),
        periods,
        failing_residues,
        metric,
        ramification: tr,
        bounds,
        expected,
        observed,
        verdicts,
        passed,
    })
}

impl Certificate {
    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.verdicts.iter().find(|v| v.name == name).map(|v| v.holds)
    }

    /// Order of the ramified value nearest `v`.
    pub fn order_at(&self, v: Complex64) -> Option<usize> {
        self.ramification.order_of(&SpherePoint::Finite(v), 1e-6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::example_params;
    use crate::weierstrass::DEFAULT_PERIOD_TOL;

    #[test]
    fn every_worked_example_is_certified() {
        for id in FamilyId::ALL.into_iter().filter(|id| !id.is_canonical()) {
            let c = verify_solution(id, &example_params(id).unwrap(), DEFAULT_PERIOD_TOL).unwrap();
            assert!(c.passed, "{id}: {:?}", c.verdicts);
        }
    }

    #[test]
    fn p49_has_two_quadruple_values() {
        let p = example_params(FamilyId::P49W5).unwrap();
        let c = verify_solution(FamilyId::P49W5, &p, DEFAULT_PERIOD_TOL).unwrap();
        assert_eq!(c.order_at(*p.get("b1").unwrap()), Some(4));
        assert_eq!(c.order_at(*p.get("b2").unwrap()), Some(4));
        assert_eq!(serde_json::to_value(&c.observed).unwrap()["nu_g"], "5/2");
    }

    #[test]
    fn generic_parameters_fail_the_period_check() {
        let p = ParamSet::new()
            .with("sigma", Complex64::new(0.4, 0.9))
            .with("tau", Complex64::new(-0.3, 0.2))
            .with("b", Complex64::new(1.1, -0.5))
            .with("theta", Complex64::new(1.0, 0.0));
        let c = verify_solution(FamilyId::T47C1W1, &p, DEFAULT_PERIOD_TOL).unwrap();
        assert!(!c.passed);
        assert_eq!(c.verdict("periods"), Some(false));
        assert!(!c.failing_residues.is_empty());
        assert_eq!(c.verdict("complete"), Some(true));
    }

    #[test]
    fn canonical_maps_have_nothing_to_verify() {
        assert!(verify_solution(FamilyId::CanonG42, &ParamSet::<Complex64>::new(), 1e-9).is_err());
    }
}
