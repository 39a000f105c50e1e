use num_complex::Complex64;
use serde::Serialize;

use super::alpha::{alpha, AlphaForm};
use super::data::{WeierstrassData, POINT_TOL};
use crate::algebra::{
    laurent_residue, residue, roots, RationalMap, ResidueConfig, ResidueMode, Scalar, SpherePoint, ROOT_TOL,
};
use crate::error::Result;
use crate::sphere::PuncturedSphere;

pub const DEFAULT_PERIOD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodEntry {
    pub point: SpherePoint<Complex64>,
    pub residues: [Complex64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodReport {
    pub mode: ResidueMode,
    pub tol: f64,
    pub entries: Vec<PeriodEntry>,
    pub max_im: f64,
    /// Largest residue modulus.
    pub scale: f64,
    /// Largest componentwise modulus of the sum of residues over all poles.
    pub sum_defect: f64,
    pub passed: bool,
}

impl PeriodReport {
    pub fn at(&self, p: &SpherePoint<Complex64>) -> Option<&[Complex64; 3]> {
        self.entries
            .iter()
            .find(|e| crate::algebra::value_distance(&e.point, p) <= POINT_TOL)
            .map(|e| &e.residues)
    }
}

/// Residues at poles of `r` away from the punctures (numeric, from the
/// floating Laurent expansion).
fn interior_residue_sum(r: &RationalMap<Complex64>, dom: &PuncturedSphere<Complex64>) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    if r.den().degree().unwrap() > 0 {
        for c in roots(r.den(), ROOT_TOL)? {
            let p = SpherePoint::Finite(c.center());
            if dom.find_c64(&p, POINT_TOL).is_none() {
                acc += laurent_residue(r, &p, false)?.value;
            }
        }
    }
    let inf = SpherePoint::Infinity;
    if dom.find_c64(&inf, POINT_TOL).is_none() {
        acc += laurent_residue(r, &inf, false)?.value;
    }
    Ok(acc)
}

/// Residues of `α` at every puncture and the realness verdict.
pub fn period_report<S: Scalar>(
    data: &WeierstrassData<S>,
    mode: ResidueMode,
    tol: f64,
    cfg: &ResidueConfig,
) -> Result<PeriodReport> {
    let a = alpha(data)?;
    period_report_for(&a, &data.dom, mode, tol, cfg)
}

pub fn period_report_for<S: Scalar>(
    a: &AlphaForm<S>,
    dom: &PuncturedSphere<S>,
    mode: ResidueMode,
    tol: f64,
    cfg: &ResidueConfig,
) -> Result<PeriodReport> {
    let mut entries = Vec::with_capacity(dom.len());
    for p in dom.punctures() {
        let mut res = [Complex64::new(0.0, 0.0); 3];
        for (k, c) in a.components().into_iter().enumerate() {
            res[k] = residue(c, p, mode, cfg)?;
        }
        entries.push(PeriodEntry {
            point: p.to_c64(),
            residues: res,
        });
    }
    let all = entries.iter().flat_map(|e| e.residues.iter());
    let max_im = all.clone().map(|z| z.im.abs()).fold(0.0, f64::max);
    let scale = all.map(|z| z.norm()).fold(0.0, f64::max);
    let dc = dom.to_c64();
    let mut sum_defect: f64 = 0.0;
    for (k, c) in a.components().into_iter().enumerate() {
        let mut s: Complex64 = entries.iter().map(|e| e.residues[k]).sum();
        s += interior_residue_sum(&c.to_c64(), &dc)?;
        sum_defect = sum_defect.max(s.norm());
    }
    Ok(PeriodReport {
        mode,
        tol,
        passed: max_im <= tol * (1.0 + scale),
        entries,
        max_im,
        scale,
        sum_defect,
    })
}
