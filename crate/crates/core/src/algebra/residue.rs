//! Residues of `R(z) dz`: local Laurent expansion and contour quadrature.

use num_complex::Complex64;

use super::poly::Poly;
use super::rational::{RationalMap, SpherePoint};
use super::roots::{roots, ROOT_TOL};
use super::scalar::Scalar;
use crate::error::{Error, Result};

pub const DEFAULT_CONTOUR_NODES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidueMode {
    /// Laurent expansion by shifted division; bit-exact for exact scalars.
    Exact,
    /// Trapezoid rule on a circle around the pole.
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueConfig {
    pub nodes: usize,
    /// Fixed contour radius; `None` picks half the distance to the nearest
    /// other pole, capped at 1.
    pub radius: Option<f64>,
    /// Error with `NotAPole` instead of returning zero with `pole_order == 0`.
    pub strict: bool,
}

impl Default for ResidueConfig {
    fn default() -> Self {
        ResidueConfig {
            nodes: DEFAULT_CONTOUR_NODES,
            radius: None,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residue<S> {
    pub value: S,
    /// Order of the denominator's zero at the point; 0 flags a non-pole.
    pub pole_order: usize,
}

/// `-R(1/w)/w²`, the coefficient of `dw` after `z = 1/w`.
pub fn form_at_infinity<S: Scalar>(r: &RationalMap<S>) -> RationalMap<S> {
    let n = r.num().degree().unwrap_or(0);
    let m = r.den().degree().unwrap();
    let num_rev = r.num().reversed(n);
    let den_rev = r.den().reversed(m);
    // R(1/w) = w^(m-n) num_rev / den_rev, times -1/w².
    let shift = m as i64 - n as i64 - 2;
    let (num, den) = if shift >= 0 {
        (&num_rev * &Poly::monomial(-S::one(), shift as usize), den_rev)
    } else {
        (
            num_rev.scale(&-S::one()),
            &den_rev * &Poly::monomial(S::one(), (-shift) as usize),
        )
    };
    RationalMap::new(num, den).unwrap()
}

/// Residue at `p` from the local Laurent expansion.
pub fn laurent_residue<S: Scalar>(
    r: &RationalMap<S>,
    p: &SpherePoint<S>,
    strict: bool,
) -> Result<Residue<S>> {
    match p {
        SpherePoint::Infinity => {
            laurent_residue(&form_at_infinity(r), &SpherePoint::Finite(S::zero()), strict)
        }
        SpherePoint::Finite(a) => {
            if r.is_zero() {
                return not_a_pole(a, strict);
            }
            let m = r.den().order_at(a);
            if m == 0 {
                return not_a_pole(a, strict);
            }
            let mut q = r.den().clone();
            for _ in 0..m {
                q = q.deflate(a).0;
            }
            let ns = r.num().shift(a);
            let qs = q.shift(a);
            let q0 = qs.coeff(0);
            // Power series coefficients of ns/qs up to u^(m-1).
            let mut c: Vec<S> = Vec::with_capacity(m);
            for k in 0..m {
                let mut acc = ns.coeff(k);
                for j in 1..=k {
                    acc = acc - qs.coeff(j) * c[k - j].clone();
                }
                c.push(acc / q0.clone());
            }
            Ok(Residue {
                value: c[m - 1].clone(),
                pole_order: m,
            })
        }
    }
}

fn not_a_pole<S: Scalar>(a: &S, strict: bool) -> Result<Residue<S>> {
    if strict {
        Err(Error::NotAPole(format!("{a:?}")))
    } else {
        Ok(Residue {
            value: S::zero(),
            pole_order: 0,
        })
    }
}

/// `(1/2πi)∮ R dz` on a circle around `p` with the trapezoid rule.
pub fn contour_residue<S: Scalar>(
    r: &RationalMap<S>,
    p: &SpherePoint<S>,
    cfg: &ResidueConfig,
) -> Result<Complex64> {
    let (r, a) = match p {
        SpherePoint::Infinity => (form_at_infinity(r).to_c64(), Complex64::new(0.0, 0.0)),
        SpherePoint::Finite(a) => (r.to_c64(), a.to_c64()),
    };
    if cfg.nodes < 8 {
        return Err(Error::ConfigError("contour needs at least 8 nodes".into()));
    }
    let poles = if r.den().is_constant() {
        Vec::new()
    } else {
        roots(r.den(), ROOT_TOL)?
    };
    let mut is_pole = false;
    let mut dist = f64::INFINITY;
    for cl in &poles {
        let d = (cl.center() - a).norm();
        if d <= cl.radius + 1e-9 * (1.0 + a.norm()) {
            is_pole = true;
        } else {
            dist = dist.min(d);
        }
    }
    if !is_pole && cfg.strict {
        return Err(Error::NotAPole(format!("{a}")));
    }
    let radius = match cfg.radius {
        Some(rad) => {
            if !(rad > 0.0) {
                return Err(Error::ConfigError("contour radius must be positive".into()));
            }
            if dist < 2.0 * rad {
                return Err(Error::ContourTooLarge {
                    radius: rad,
                    distance: dist,
                });
            }
            rad
        }
        None => (dist / 2.0).min(1.0),
    };
    let n = cfg.nodes;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let e = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
        acc += r.value_c64(a + e * radius) * e;
    }
    let res = acc * (radius / n as f64);
    if !res.re.is_finite() || !res.im.is_finite() {
        return Err(Error::NonFinite("contour residue".into()));
    }
    Ok(res)
}

/// Residue in the requested mode, as a float.
pub fn residue<S: Scalar>(
    r: &RationalMap<S>,
    p: &SpherePoint<S>,
    mode: ResidueMode,
    cfg: &ResidueConfig,
) -> Result<Complex64> {
    match mode {
        ResidueMode::Exact => Ok(laurent_residue(r, p, cfg.strict)?.value.to_c64()),
        ResidueMode::Numeric => contour_residue(r, p, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExactComplex as E;

    fn ep(v: &[(i64, i64)]) -> Poly<E> {
        Poly::new(v.iter().map(|&(a, b)| E::from_ints(a, b)).collect())
    }

    fn fin(a: E) -> SpherePoint<E> {
        SpherePoint::Finite(a)
    }

    #[test]
    fn simple_and_double_poles_at_zero() {
        let inv = RationalMap::new(ep(&[(1, 0)]), ep(&[(0, 0), (1, 0)])).unwrap();
        let r = laurent_residue(&inv, &fin(E::zero()), true).unwrap();
        assert_eq!(r.value, E::one());
        assert_eq!(r.pole_order, 1);
        let inv2 = RationalMap::new(ep(&[(1, 0)]), ep(&[(0, 0), (0, 0), (1, 0)])).unwrap();
        assert_eq!(
            laurent_residue(&inv2, &fin(E::zero()), true).unwrap().value,
            E::zero()
        );
        let c = contour_residue(&inv, &fin(E::zero()), &ResidueConfig::default()).unwrap();
        assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn not_a_pole_policy() {
        let inv = RationalMap::new(ep(&[(1, 0)]), ep(&[(0, 0), (1, 0)])).unwrap();
        let r = laurent_residue(&inv, &fin(E::one()), false).unwrap();
        assert_eq!(r.pole_order, 0);
        assert_eq!(r.value, E::zero());
        assert!(matches!(
            laurent_residue(&inv, &fin(E::one()), true),
            Err(Error::NotAPole(_))
        ));
    }

    #[test]
    fn residue_at_infinity_of_inverse() {
        // Res_∞ (dz/z) = -1
        let inv = RationalMap::new(ep(&[(1, 0)]), ep(&[(0, 0), (1, 0)])).unwrap();
        let r = laurent_residue(&inv, &SpherePoint::Infinity, true).unwrap();
        assert_eq!(r.value, E::from_ints(-1, 0));
    }

    #[test]
    fn contour_too_large() {
        // poles at 0 and 1
        let r = RationalMap::new(ep(&[(1, 0)]), ep(&[(0, 0), (-1, 0), (1, 0)])).unwrap();
        let cfg = ResidueConfig {
            radius: Some(0.6),
            ..Default::default()
        };
        assert!(matches!(
            contour_residue(&r, &fin(E::zero()), &cfg),
            Err(Error::ContourTooLarge { .. })
        ));
    }

    #[test]
    fn removable_common_factor_in_float_map() {
        // (z - 2)/((z - 2) z²) stays unreduced in floating mode; Res_0 of 1/z² is 0
        let num = Poly::new(vec![Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)]);
        let den = &num * &Poly::monomial(Complex64::new(1.0, 0.0), 2);
        let r = RationalMap::new(num, den).unwrap();
        let v = laurent_residue(&r, &SpherePoint::Finite(Complex64::new(0.0, 0.0)), true).unwrap();
        assert!(v.value.norm() < 1e-15);
    }
}
