use num_complex::Complex64;
use serde::Serialize;

use super::params::ParamSet;
use super::FamilyId;
use crate::algebra::{Scalar, SpherePoint};
use crate::error::{Error, Result};

/// Closed-form residues of `α` at one end.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueTriple<S: Scalar> {
    pub point: SpherePoint<S>,
    pub residues: [S; 3],
}

fn k<S: Scalar>(n: i64) -> S {
    S::from_i64(n)
}

fn q<S: Scalar>(n: i64, d: i64) -> S {
    S::ratio(n, d)
}

struct T47<S> {
    s: S,
    t: S,
    b: S,
    th: S,
}

impl<S: Scalar> T47<S> {
    fn read(id: FamilyId, p: &ParamSet<S>) -> Result<Self> {
        Ok(T47 {
            s: p.require(id, "sigma")?,
            t: p.require(id, "tau")?,
            b: p.require(id, "b")?,
            th: p.require(id, "theta")?,
        })
    }

    /// `θ(b - σ)`.
    fn u(&self) -> S {
        self.th.clone() * (self.b.clone() - self.s.clone())
    }

    /// The three brackets of variants (1) and (2): `(p, q, r) = (3, 13, 5)` or `(5, 11, 3)`.
    fn x(&self, p: i64, qq: i64, r: i64) -> [S; 3] {
        let (s, t, b) = (self.s.clone(), self.t.clone(), self.b.clone());
        let st16 = s.clone() * t.clone() * k(16);
        let t2 = t.clone() * t.clone();
        let x1 = b.clone() * (st16.clone() - t2.clone() * k(p) - k(qq))
            - s.clone() * (t2.clone() * k(qq) + k(p))
            + t.clone() * k(16);
        let x2 = b.clone() * (st16 - t2.clone() * k(p) + k(qq))
            - s.clone() * (t2 * k(qq) - k(p))
            - t.clone() * k(16);
        let x3 = b * (s.clone() * k(8) + t.clone() * k(r)) - t.clone() * (s * k(r) + t * k(8));
        [x1, x2, x3]
    }

    /// The brackets shared by case 1 variant (8) and case 4 variant (5).
    fn y(&self) -> [S; 3] {
        let (s, t, b) = (self.s.clone(), self.t.clone(), self.b.clone());
        let st4 = s.clone() * t.clone() * k(4);
        let t2 = t.clone() * t.clone();
        let y1 = b.clone() * (st4.clone() - t2.clone() - k(3)) - s.clone() * (t2.clone() * k(3) + k(1))
            + t.clone() * k(4);
        let y2 = b.clone() * (st4 - t2.clone() + k(3)) - s.clone() * (t2 * k(3) - k(1)) - t.clone() * k(4);
        let y3 = b * (s.clone() * k(2) + t.clone()) - t.clone() * (s + t * k(2));
        [y1, y2, y3]
    }

    /// Brackets of case 1 variant (5); `printed` keeps the displayed second one.
    fn w5(&self, printed: bool) -> [S; 3] {
        let (s, t, b) = (self.s.clone(), self.t.clone(), self.b.clone());
        let s2 = s.clone() * s.clone();
        let t2 = t.clone() * t.clone();
        let st = s.clone() * t.clone();
        let b2 = b.clone() * b.clone();
        let base = s2.clone() * k(128) - st.clone() * k(32) + t2.clone() * k(15);
        let p1 = b2.clone() * (base.clone() - k(111))
            - b.clone()
                * k(2)
                * (s2.clone() * t.clone() * k(112) - s.clone() * t2.clone() + s.clone() - t.clone() * k(112))
            + s2.clone() * k(3) * (t2.clone() * k(37) - k(5))
            + t.clone() * k(32) * (s.clone() - t.clone() * k(4));
        let last = if printed {
            s.clone() + t.clone() * k(4)
        } else {
            s.clone() - t.clone() * k(4)
        };
        let p2 = b2.clone() * (base + k(111))
            - b.clone()
                * k(2)
                * (s2.clone() * t.clone() * k(112) - s.clone() * t2.clone() - s.clone() + t.clone() * k(112))
            + s2.clone() * k(3) * (t2.clone() * k(37) + k(5))
            - t.clone() * k(32) * last;
        let p3 = b2 * (s.clone() * k(112) - t.clone())
            + b * k(2) * (s2 * k(8) - st.clone() * k(127) + t2 * k(8))
            - st * (s - t * k(112));
        [p1, p2, p3]
    }
}

struct P49<S> {
    s: S,
    b1: S,
    b2: S,
    th: S,
}

impl<S: Scalar> P49<S> {
    fn read(id: FamilyId, p: &ParamSet<S>) -> Result<Self> {
        Ok(P49 {
            s: p.require(id, "sigma")?,
            b1: p.require(id, "b1")?,
            b2: p.require(id, "b2")?,
            th: p.require(id, "theta")?,
        })
    }

    /// Brackets of the residues at `i` (first three) and at `0` (last three).
    fn brackets(&self) -> [S; 6] {
        let (s, b1, b2) = (self.s.clone(), self.b1.clone(), self.b2.clone());
        let one = S::one();
        let s2 = s.clone() * s.clone();
        let b1s = b1.clone() * b1.clone();
        let b2s = b2.clone() * b2.clone();
        let core = b2s.clone() * k(32) - b2.clone() * s.clone() * k(32);
        let a1 = s.clone() * k(32) * (b2.clone() - s.clone())
            + b2s.clone() * k(13) * (s2.clone() - one.clone())
            + b1s.clone() * (core.clone() + (s2.clone() - one.clone()) * k(13))
            + b1.clone()
                * (s.clone() * k(32) - b2s.clone() * s.clone() * k(32)
                    + b2.clone() * k(6) * (s2.clone() - one.clone()));
        let a2 = s.clone() * k(32) * (b2.clone() - s.clone())
            - b2s.clone() * k(13) * (s2.clone() + one.clone())
            - b1s.clone() * (core + (s2.clone() + one.clone()) * k(13))
            + b1.clone()
                * (s.clone() * k(32) + b2s.clone() * s.clone() * k(32)
                    - b2.clone() * k(6) * (s2.clone() + one.clone()));
        let a3 = b1s * (b2.clone() * k(16) - s.clone() * k(3))
            - b2.clone() * s.clone() * (b2.clone() * k(3) - s.clone() * k(16))
            + b1.clone() * k(2) * (b2s * k(8) - b2.clone() * s.clone() * k(29) + s2.clone() * k(8));
        let d = b1.clone() - b2.clone();
        let c1 = d.clone()
            * (b1.clone() * (b2.clone() * s.clone() * k(2) - s2.clone() - one.clone())
                - b2.clone() * (s2.clone() + one.clone())
                + s.clone() * k(2));
        let c2 = d.clone()
            * (b1.clone() * (b2.clone() * s.clone() * k(2) - s2.clone() + one.clone())
                - b2.clone() * (s2.clone() - one)
                - s.clone() * k(2));
        let c3 = d * (b1 * b2 - s2);
        [a1, a2, a3, c1, c2, c3]
    }
}

fn fin<S: Scalar>(z: S) -> SpherePoint<S> {
    SpherePoint::Finite(z)
}

fn scaled<S: Scalar>(c: &[S; 3], v: &[S; 3]) -> [S; 3] {
    [
        c[0].clone() * v[0].clone(),
        c[1].clone() * v[1].clone(),
        c[2].clone() * v[2].clone(),
    ]
}

fn neg3<S: Scalar>(v: &[S; 3]) -> [S; 3] {
    [-v[0].clone(), -v[1].clone(), -v[2].clone()]
}

fn zero3<S: Scalar>() -> [S; 3] {
    [S::zero(), S::zero(), S::zero()]
}

/// Ends `i, -i, 0` with their residues.
fn ends<S: Scalar>(at_i: [S; 3], at_mi: [S; 3], at_0: [S; 3]) -> Vec<ResidueTriple<S>> {
    vec![
        ResidueTriple {
            point: fin(S::i()),
            residues: at_i,
        },
        ResidueTriple {
            point: fin(-S::i()),
            residues: at_mi,
        },
        ResidueTriple {
            point: fin(S::zero()),
            residues: at_0,
        },
    ]
}

fn formulas<S: Scalar>(id: FamilyId, p: &ParamSet<S>, printed: bool) -> Result<Vec<ResidueTriple<S>>> {
    let i = S::i();
    match id {
        FamilyId::T47C1W1 | FamilyId::T47C1W2 => {
            let f = T47::read(id, p)?;
            let x = if id == FamilyId::T47C1W1 {
                f.x(3, 13, 5)
            } else {
                f.x(5, 11, 3)
            };
            let u = f.u();
            let mut c = [
                i.clone() * q(1, 8) * u.clone(),
                q::<S>(1, 8) * u.clone(),
                -(i * q(1, 4) * u),
            ];
            // The displayed variant-(2) residues carry the opposite overall sign.
            if id == FamilyId::T47C1W2 && !printed {
                c = neg3(&c);
            }
            let r = scaled(&c, &x);
            Ok(ends(r.clone(), neg3(&r), zero3()))
        }
        FamilyId::T47C1W5 => {
            let f = T47::read(id, p)?;
            let x = f.w5(printed);
            let th = f.th.clone();
            let c = [
                -(i.clone() * q(1, 32) * th.clone()),
                -(q::<S>(1, 32) * th.clone()),
                i * q(1, 16) * th,
            ];
            let r = scaled(&c, &x);
            Ok(ends(r.clone(), neg3(&r), zero3()))
        }
        FamilyId::T47C1W8 => {
            let f = T47::read(id, p)?;
            let u = f.u();
            let c = [q::<S>(1, 2) * u.clone(), -(i * q(1, 2) * u.clone()), -u];
            let r = scaled(&c, &f.y());
            // Displayed as Res(i) = -2 Res(0); the expansion gives Res(0) = -2 Res(i).
            let f0 = if printed { q::<S>(-1, 2) } else { k::<S>(-2) };
            let at_0 = [f0.clone(), f0.clone(), f0];
            Ok(ends(r.clone(), r.clone(), scaled(&at_0, &r)))
        }
        FamilyId::T47C4W5 => {
            let f = T47::read(id, p)?;
            let u = f.u();
            let c = [
                -(i.clone() * q(1, 2) * u.clone()),
                -(q::<S>(1, 2) * u.clone()),
                i * u,
            ];
            let r = scaled(&c, &f.y());
            Ok(ends(r.clone(), neg3(&r), zero3()))
        }
        FamilyId::P49W5 => {
            let f = P49::read(id, p)?;
            let x = f.brackets();
            let th = f.th.clone();
            let at_i = [
                i.clone() * q(1, 2) * th.clone() * x[0].clone(),
                -(q::<S>(1, 2) * th.clone() * x[1].clone()),
                -(i.clone() * th.clone() * x[2].clone()),
            ];
            // The display relates the second components at ±i with a plus sign.
            let at_mi = [
                -at_i[0].clone(),
                if printed {
                    at_i[1].clone()
                } else {
                    -at_i[1].clone()
                },
                -at_i[2].clone(),
            ];
            let at_0 = [
                th.clone() * k(4) * x[3].clone(),
                -(i * th.clone() * k(4) * x[4].clone()),
                -(th * k(8) * x[5].clone()),
            ];
            Ok(ends(at_i, at_mi, at_0))
        }
        _ => Err(Error::Unsupported(format!("no closed-form residues for {id}"))),
    }
}

/// Residues of `α` at `i, -i, 0` from the closed forms, with the sign
/// corrections that make them agree with the Laurent expansion.
pub fn residue_formulas<S: Scalar>(id: FamilyId, p: &ParamSet<S>) -> Result<Vec<ResidueTriple<S>>> {
    formulas(id, p, false)
}

/// The closed forms exactly as displayed, including the misprints.
pub fn printed_residue_formulas<S: Scalar>(id: FamilyId, p: &ParamSet<S>) -> Result<Vec<ResidueTriple<S>>> {
    formulas(id, p, true)
}

fn re<S: Scalar>(x: S) -> f64 {
    x.to_c64().re
}

fn im<S: Scalar>(x: S) -> f64 {
    x.to_c64().im
}

/// Left-hand sides of the real period constraints, in display order.
pub fn period_constraints<S: Scalar>(id: FamilyId, p: &ParamSet<S>) -> Result<Vec<f64>> {
    match id {
        FamilyId::T47C1W1 | FamilyId::T47C1W2 | FamilyId::T47C4W5 | FamilyId::T47C1W8 => {
            let f = T47::read(id, p)?;
            let u = f.u();
            let x = match id {
                FamilyId::T47C1W1 => f.x(3, 13, 5),
                FamilyId::T47C1W2 => f.x(5, 11, 3),
                _ => f.y(),
            };
            let v: Vec<S> = x.into_iter().map(|x| u.clone() * x).collect();
            Ok(if id == FamilyId::T47C1W8 {
                vec![im(v[0].clone()), re(v[1].clone()), im(v[2].clone())]
            } else {
                vec![re(v[0].clone()), im(v[1].clone()), re(v[2].clone())]
            })
        }
        FamilyId::T47C1W5 => {
            let f = T47::read(id, p)?;
            let x = f.w5(false);
            let th = f.th.clone();
            Ok(vec![
                re(th.clone() * x[0].clone()),
                im(th.clone() * x[1].clone()),
                re(th * x[2].clone()),
            ])
        }
        FamilyId::P49W5 => {
            let f = P49::read(id, p)?;
            let th = f.th.clone();
            let x: Vec<S> = f.brackets().into_iter().map(|x| th.clone() * x).collect();
            Ok(vec![
                re(x[0].clone()),
                im(x[1].clone()),
                re(x[2].clone()),
                im(x[3].clone()),
                re(x[4].clone()),
                im(x[5].clone()),
            ])
        }
        _ => Err(Error::InvalidParams {
            family: id.to_string(),
            predicate: "a family with displayed period constraints".into(),
        }),
    }
}

/// Residues at `-i` for case 2 with ω variant (1), `U = θ(b - σ)²`.
pub fn case2_residue_triple(u: Complex64, tau: Complex64) -> [Complex64; 3] {
    let i = Complex64::i();
    [
        -64.0 * i * u * (tau * tau - 1.0),
        -64.0 * u * (tau * tau + 1.0),
        128.0 * i * u * tau,
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionTriple {
    /// `((τ² - 1)U, (τ² + 1)U, τU)`.
    pub triple: [Complex64; 3],
    /// Whether each entry lies on its required axis: `iR`, `R`, `iR`.
    pub conditions: [bool; 3],
    /// `"tau^2+1=0"`, `"|tau|=1"` or `"generic"`.
    pub branch: &'static str,
    /// Smallest singular value of the real 3×2 system the conditions impose on `U`.
    pub min_singular: f64,
    /// True when only `U = 0` satisfies all three conditions.
    pub infeasible: bool,
}

/// The three quantities whose axis conditions rule out case 2, and the
/// verdict that no `U ≠ 0` meets them.
pub fn obstruction_triple(u: Complex64, tau: Complex64) -> ObstructionTriple {
    let t2 = tau * tau;
    let c = [t2 - 1.0, t2 + 1.0, tau];
    let triple = [c[0] * u, c[1] * u, c[2] * u];
    let tol = 1e-12 * (1.0 + u.norm()) * (1.0 + t2.norm());
    let conditions = [
        triple[0].re.abs() <= tol,
        triple[1].im.abs() <= tol,
        triple[2].re.abs() <= tol,
    ];
    let branch = if (t2 + 1.0).norm() <= 1e-12 {
        "tau^2+1=0"
    } else if (tau.norm() - 1.0).abs() <= 1e-12 {
        "|tau|=1"
    } else {
        "generic"
    };
    // Rows act on U = x + iy: Re(cU) = c.re x - c.im y, Im(cU) = c.im x + c.re y.
    let rows = [[c[0].re, -c[0].im], [c[1].im, c[1].re], [c[2].re, -c[2].im]];
    let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
    for r in rows {
        a += r[0] * r[0];
        b += r[0] * r[1];
        d += r[1] * r[1];
    }
    let mean = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let min_singular = (mean - disc).max(0.0).sqrt();
    let scale = (a + d).sqrt().max(1.0);
    ObstructionTriple {
        triple,
        conditions,
        branch,
        min_singular,
        infeasible: min_singular > 1e-12 * scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExactComplex as E;
    use crate::algebra::{ResidueConfig, ResidueMode};
    use crate::families::build::t47_data;
    use crate::families::{build, exact_example_params, example_params};
    use crate::weierstrass::{period_report, DEFAULT_PERIOD_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_params(id: FamilyId, rng: &mut ChaCha8Rng) -> ParamSet<Complex64> {
        let mut z = || c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if id == FamilyId::P49W5 {
            ParamSet::new()
                .with("sigma", z())
                .with("b1", z())
                .with("b2", z())
                .with("theta", z())
        } else {
            ParamSet::new()
                .with("sigma", z())
                .with("tau", z())
                .with("b", z())
                .with("theta", z())
        }
    }

    fn max_rel_gap(a: &[ResidueTriple<Complex64>], report: &crate::weierstrass::PeriodReport) -> f64 {
        let mut worst: f64 = 0.0;
        for t in a {
            let r = report.at(&t.point).unwrap();
            for k in 0..3 {
                worst = worst.max((t.residues[k] - r[k]).norm() / (1.0 + r[k].norm()));
            }
        }
        worst
    }

    const COVERED: [FamilyId; 6] = [
        FamilyId::T47C1W1,
        FamilyId::T47C1W2,
        FamilyId::T47C1W5,
        FamilyId::T47C1W8,
        FamilyId::T47C4W5,
        FamilyId::P49W5,
    ];

    #[test]
    fn closed_forms_match_laurent_residues_at_random_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = ResidueConfig::default();
        for id in COVERED {
            for _ in 0..5 {
                let p = random_params(id, &mut rng);
                let data = build(id, &p).unwrap().data.unwrap();
                let rep = period_report(&data, ResidueMode::Exact, DEFAULT_PERIOD_TOL, &cfg).unwrap();
                let gap = max_rel_gap(&residue_formulas(id, &p).unwrap(), &rep);
                assert!(gap < 1e-8, "{id}: {gap}");
            }
        }
    }

    #[test]
    fn closed_forms_are_exact_at_rational_parameters() {
        let cfg = ResidueConfig::default();
        let p = ParamSet::new()
            .with("sigma", E::from_ints(1, 2))
            .with("tau", E::from_ratio(-1, 3))
            .with("b", E::from_ints(2, -1))
            .with("theta", E::from_ints(3, 1))
            .with("b1", E::from_ints(2, -1))
            .with("b2", E::from_ratio(1, 5));
        for id in COVERED {
            let data = build(id, &p).unwrap().data.unwrap();
            let a = crate::weierstrass::alpha(&data).unwrap();
            for t in residue_formulas(id, &p).unwrap() {
                for (kk, comp) in a.components().into_iter().enumerate() {
                    let r = crate::algebra::laurent_residue(comp, &t.point, false)
                        .unwrap()
                        .value;
                    assert_eq!(r, t.residues[kk], "{id} at {} component {}", t.point, kk + 1);
                }
            }
            let _ = period_report(&data, ResidueMode::Exact, DEFAULT_PERIOD_TOL, &cfg).unwrap();
        }
    }

    #[test]
    fn printed_misprints_disagree_with_the_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = ResidueConfig::default();
        for id in [
            FamilyId::T47C1W2,
            FamilyId::T47C1W5,
            FamilyId::T47C1W8,
            FamilyId::P49W5,
        ] {
            let p = random_params(id, &mut rng);
            let data = build(id, &p).unwrap().data.unwrap();
            let rep = period_report(&data, ResidueMode::Exact, DEFAULT_PERIOD_TOL, &cfg).unwrap();
            assert!(
                max_rel_gap(&printed_residue_formulas(id, &p).unwrap(), &rep) > 1e-3,
                "{id}"
            );
        }
        for id in [FamilyId::T47C1W1, FamilyId::T47C4W5] {
            let p = random_params(id, &mut rng);
            assert_eq!(
                printed_residue_formulas(id, &p).unwrap(),
                residue_formulas(id, &p).unwrap()
            );
        }
    }

    #[test]
    fn w8_ratio_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_params(FamilyId::T47C1W8, &mut rng);
        let r = residue_formulas(FamilyId::T47C1W8, &p).unwrap();
        let printed = printed_residue_formulas(FamilyId::T47C1W8, &p).unwrap();
        for kk in 0..3 {
            assert_eq!(r[0].residues[kk], r[1].residues[kk]);
            assert!((r[2].residues[kk] + 2.0 * r[0].residues[kk]).norm() < 1e-12 * r[0].residues[kk].norm());
            assert!(
                (printed[0].residues[kk] + 2.0 * printed[2].residues[kk]).norm()
                    < 1e-12 * r[0].residues[kk].norm()
            );
        }
    }

    #[test]
    fn w1_example_reduces_to_a_cube_condition() {
        // τ = 0, b = -3σ/13: the first two constraints vanish for every σ.
        for sigma in [c(0.3, 1.1), c(-2.0, 0.5), c(1.0, 0.0)] {
            let p = ParamSet::new()
                .with("sigma", sigma)
                .with("tau", c(0.0, 0.0))
                .with("b", -3.0 * sigma / 13.0)
                .with("theta", c(1.0, 0.0));
            let v = period_constraints(FamilyId::T47C1W1, &p).unwrap();
            assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
            let cube = sigma * sigma * sigma;
            // third = Re(θ(b-σ)·8σb) ∝ Re(σ³)
            assert!((v[2] - (8.0 * (-16.0 / 13.0) * (-3.0 / 13.0) * cube).re).abs() < 1e-12);
        }
        let p = example_params(FamilyId::T47C1W1).unwrap();
        assert!(period_constraints(FamilyId::T47C1W1, &p)
            .unwrap()
            .iter()
            .all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn examples_satisfy_their_constraints() {
        for id in COVERED {
            let v = period_constraints(id, &example_params(id).unwrap()).unwrap();
            assert!(v.iter().all(|x| x.abs() < 1e-9), "{id}: {v:?}");
            if let Some(p) = exact_example_params(id) {
                let v = period_constraints(id, &p).unwrap();
                assert!(v.iter().all(|x| *x == 0.0), "{id}: {v:?}");
            }
        }
        assert_eq!(
            period_constraints(FamilyId::P49W5, &example_params(FamilyId::P49W5).unwrap())
                .unwrap()
                .len(),
            6
        );
        assert!(period_constraints(FamilyId::Ms, &example_params(FamilyId::Ms).unwrap()).is_err());
        assert!(residue_formulas(FamilyId::Kw, &example_params(FamilyId::Kw).unwrap()).is_err());
    }

    #[test]
    fn generic_parameters_violate_variant_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let v = period_constraints(FamilyId::T47C1W2, &random_params(FamilyId::T47C1W2, &mut rng)).unwrap();
        assert!(v.iter().any(|x| x.abs() > 1e-3));
    }

    #[test]
    fn case2_triple_matches_the_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = ResidueConfig::default();
        for _ in 0..4 {
            let p = random_params(FamilyId::T47C1W1, &mut rng);
            let data = t47_data(2, 1, &p).unwrap();
            let rep = period_report(&data, ResidueMode::Exact, DEFAULT_PERIOD_TOL, &cfg).unwrap();
            let (s, t, b, th) = (
                *p.get("sigma").unwrap(),
                *p.get("tau").unwrap(),
                *p.get("b").unwrap(),
                *p.get("theta").unwrap(),
            );
            let u = th * (b - s) * (b - s);
            let want = case2_residue_triple(u, t);
            let got = rep.at(&SpherePoint::Finite(c(0.0, -1.0))).unwrap();
            for kk in 0..3 {
                assert!(
                    (want[kk] - got[kk]).norm() < 1e-8 * (1.0 + got[kk].norm()),
                    "{want:?} vs {got:?}"
                );
            }
        }
    }

    #[test]
    fn obstruction_examples() {
        let o = obstruction_triple(c(0.0, 1.0), c(1.0, 0.0));
        assert_eq!(o.triple, [c(0.0, 0.0), c(0.0, 2.0), c(0.0, 1.0)]);
        assert_eq!(o.conditions, [true, false, true]);
        assert_eq!(o.branch, "|tau|=1");
        assert!(o.infeasible);
        let o = obstruction_triple(c(1.0, 0.0), c(0.0, 1.0));
        assert_eq!(o.branch, "tau^2+1=0");
        assert!(o.infeasible);
        let o = obstruction_triple(c(0.7, -0.2), c(0.0, 0.0));
        assert_eq!(o.branch, "generic");
        assert!(o.infeasible);
    }

    #[test]
    fn obstruction_holds_on_a_grid() {
        // Independent check: the best nonzero U on the unit circle still violates a condition.
        for a in 0..10 {
            for bb in 0..10 {
                let tau = c(-2.0 + 0.45 * a as f64, -2.0 + 0.45 * bb as f64);
                let o = obstruction_triple(c(1.0, 0.0), tau);
                assert!(o.infeasible);
                let best = (0..720)
                    .map(|j| {
                        let u = c(0.0, j as f64 * std::f64::consts::PI / 360.0).exp();
                        let t = obstruction_triple(u, tau).triple;
                        t[0].re.abs().max(t[1].im.abs()).max(t[2].re.abs())
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(best > 0.5 * o.min_singular - 1e-9, "{tau}");
            }
        }
    }
}
