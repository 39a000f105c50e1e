use crate::algebra::{Poly, RationalMap, Scalar, SpherePoint};
use crate::error::{Error, Result};
use crate::sphere::{MoebiusMap, PuncturedSphere};
use crate::weierstrass::{OneForm, WeierstrassData};

use super::params::ParamSet;
use super::{Expected, FamilyId, FamilyInstance};

/// Exponents of `(z - z₀, z - i, z + i)` in the denominator of each ω variant.
pub const VARIANT_EXPONENTS: [[usize; 3]; 10] = [
    [2, 2, 2],
    [4, 2, 2],
    [2, 4, 2],
    [2, 2, 4],
    [2, 3, 3],
    [3, 3, 2],
    [3, 2, 3],
    [3, 2, 2],
    [2, 3, 2],
    [2, 2, 3],
];

fn int<S: Scalar>(n: i64) -> S {
    S::from_i64(n)
}

fn ipoly<S: Scalar>(c: &[i64]) -> Poly<S> {
    Poly::new(c.iter().map(|&n| int(n)).collect())
}

fn invalid(id: FamilyId, predicate: &str) -> Error {
    Error::InvalidParams {
        family: id.to_string(),
        predicate: predicate.to_string(),
    }
}

pub(crate) fn is_real<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        x.conj() == *x
    } else {
        let c = x.to_c64();
        c.im.abs() <= 1e-12 * (1.0 + c.re.abs())
    }
}

pub(crate) fn is_nonzero<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        !x.is_zero()
    } else {
        x.norm() > 1e-12
    }
}

pub(crate) fn distinct<S: Scalar>(x: &S, y: &S) -> bool {
    if S::EXACT {
        x != y
    } else {
        (x.clone() - y.clone()).norm() > 1e-12 * (1.0 + x.norm() + y.norm())
    }
}

fn agrees<S: Scalar>(x: &S, y: &S) -> bool {
    if S::EXACT {
        x == y
    } else {
        (x.clone() - y.clone()).norm() <= 1e-9 * (1.0 + x.norm() + y.norm())
    }
}

fn fin<S: Scalar>(re: i64, im: i64) -> SpherePoint<S> {
    SpherePoint::Finite(int::<S>(re) + S::i() * int(im))
}

/// The fixed punctures of each family.
pub fn family_domain<S: Scalar>(id: FamilyId) -> PuncturedSphere<S> {
    let pts = match id {
        FamilyId::Ms => vec![fin(0, 1), fin(0, -1), SpherePoint::Infinity],
        FamilyId::Kw => vec![fin(0, 0), fin(0, 1), fin(0, -1), SpherePoint::Infinity],
        FamilyId::CanonG211 => vec![SpherePoint::Infinity, fin(0, 1), fin(0, -1), fin(0, -17)],
        _ => vec![SpherePoint::Infinity, fin(0, 1), fin(0, -1), fin(0, 0)],
    };
    PuncturedSphere::new(pts).expect("distinct fixed punctures")
}

/// `P/Q` of the canonical quartics.
fn canonical_parts<S: Scalar>(case: u8) -> Result<(Poly<S>, Poly<S>)> {
    let i = S::i();
    Ok(match case {
        // 1/(2z²+1)²
        1 => (Poly::one(), ipoly::<S>(&[1, 0, 2]).pow(2)),
        // 512i(z - i)/(z² + 10iz + 23)²
        2 => {
            let q = Poly::new(vec![int(23), i.clone() * int(10), S::one()]);
            (Poly::linear_root(&i).scale(&(i * int(512))), q.pow(2))
        }
        // -4z²/(z²-1)²
        4 => (Poly::monomial(int(-4), 2), ipoly::<S>(&[-1, 0, 1]).pow(2)),
        _ => return Err(Error::Unsupported(format!("allocation case {case}"))),
    })
}

fn canonical_map<S: Scalar>(id: FamilyId) -> Result<RationalMap<S>> {
    match id {
        FamilyId::CanonG111 => {
            let (p, q) = canonical_parts(1)?;
            RationalMap::new(p, q)
        }
        FamilyId::CanonG211 => {
            let (p, q) = canonical_parts(2)?;
            RationalMap::new(p, q)
        }
        FamilyId::CanonG42 => {
            let (p, q) = canonical_parts(4)?;
            RationalMap::new(p, q)
        }
        FamilyId::CanonGd1 => RationalMap::new(ipoly::<S>(&[-1, 1]).pow(4), ipoly::<S>(&[1, 1]).pow(4)),
        _ => Err(Error::Unsupported(format!("{id} is not a canonical map"))),
    }
}

/// `(N, D)` of the Gauss map `Φ⁻¹ ∘ G` for allocation case 1, 2 or 4.
fn case_gauss_parts<S: Scalar>(case: u8, sigma: &S, tau: &S, b: &S) -> Result<(Poly<S>, Poly<S>)> {
    let (p, q) = canonical_parts::<S>(case)?;
    let bt = b.clone() - tau.clone();
    let ts = tau.clone() - sigma.clone();
    let num = &q.scale(&(sigma.clone() * bt.clone())) + &p.scale(&(b.clone() * ts.clone()));
    let den = &q.scale(&bt) + &p.scale(&ts);
    Ok((num, den))
}

/// `(N, D)` of the Gauss map with one omitted value and quadruple values `b₁, b₂`.
fn p49_gauss_parts<S: Scalar>(sigma: &S, b1: &S, b2: &S) -> (Poly<S>, Poly<S>) {
    let m = ipoly::<S>(&[-1, 1]).pow(4);
    let p = ipoly::<S>(&[1, 1]).pow(4);
    let c1 = b1.clone() - sigma.clone();
    let c2 = sigma.clone() - b2.clone();
    let num = &m.scale(&(b2.clone() * c1.clone())) + &p.scale(&(b1.clone() * c2.clone()));
    let den = &m.scale(&c1) + &p.scale(&c2);
    (num, den)
}

/// `h = θ g₁² / ((z - z₀)^e₀ (z - i)^e₁ (z + i)^e₂)` for ω variant `1..=10`.
pub fn omega_shape<S: Scalar>(variant: u8, theta: &S, g1: &Poly<S>, z0: &S) -> Result<RationalMap<S>> {
    let e = VARIANT_EXPONENTS
        .get((variant as usize).wrapping_sub(1))
        .ok_or_else(|| Error::Unsupported(format!("omega variant {variant}")))?;
    let i = S::i();
    let den = &(&Poly::linear_root(z0).pow(e[0]) * &Poly::linear_root(&i).pow(e[1]))
        * &Poly::linear_root(&-i).pow(e[2]);
    RationalMap::new(g1.pow(2).scale(theta), den)
}

fn t47_checks<S: Scalar>(id: FamilyId, sigma: &S, tau: &S, b: &S, theta: &S) -> Result<()> {
    if !(distinct(sigma, tau) && distinct(sigma, b) && distinct(tau, b)) {
        return Err(invalid(id, "sigma, tau, b pairwise distinct"));
    }
    if !is_nonzero(theta) {
        return Err(invalid(id, "theta != 0"));
    }
    Ok(())
}

/// Weierstrass data for allocation case 1, 2 or 4 with ω variant `1..=10`.
/// The fourth puncture is `0`, or `-17i` in case 2.
pub fn t47_data<S: Scalar>(case: u8, variant: u8, params: &ParamSet<S>) -> Result<WeierstrassData<S>> {
    let id = FamilyId::T47C1W1;
    let get = |n: &str| params.require(id, n);
    let (sigma, tau, b, theta) = (get("sigma")?, get("tau")?, get("b")?, get("theta")?);
    t47_checks(id, &sigma, &tau, &b, &theta)?;
    let (num, den) = case_gauss_parts(case, &sigma, &tau, &b)?;
    let z0: S = if case == 2 { S::i() * int(-17) } else { S::zero() };
    let h = omega_shape(variant, &theta, &den, &z0)?;
    let dom = PuncturedSphere::new(vec![
        SpherePoint::Infinity,
        fin(0, 1),
        fin(0, -1),
        SpherePoint::Finite(z0),
    ])?;
    WeierstrassData::new(RationalMap::new(num, den)?, OneForm::new(h)?, dom)
}

fn ms<S: Scalar>(id: FamilyId, p: &ParamSet<S>) -> Result<(RationalMap<S>, RationalMap<S>)> {
    let (a, t, sigma) = (p.require(id, "a")?, p.require(id, "t")?, p.require(id, "sigma")?);
    if !(is_real(&a) && is_real(&t)) {
        return Err(invalid(id, "a, t real"));
    }
    let one = S::one();
    if !is_nonzero(&((a.clone() - one.clone()) * (t.clone() - one.clone()))) {
        return Err(invalid(id, "(a-1)(t-1) != 0"));
    }
    if !is_nonzero(&a) {
        return Err(invalid(id, "a != 0"));
    }
    let q = a.clone() * ((t.clone() - one.clone()) * a.clone() + int(4));
    if !is_nonzero(&q) {
        return Err(invalid(id, "a((t-1)a+4) != 0"));
    }
    let rhs = (t.clone() + int(3)) / q;
    if !agrees(&(sigma.clone() * sigma.clone()), &rhs) {
        return Err(invalid(id, "sigma^2 = (t+3)/(a((t-1)a+4))"));
    }
    if !(rhs.to_c64().re < 0.0) {
        return Err(invalid(id, "sigma^2 < 0"));
    }
    let c0 = one.clone() + a * (t.clone() - one.clone());
    let num = Poly::new(vec![c0, S::zero(), S::one()]).scale(&sigma);
    let den = Poly::new(vec![t, S::zero(), S::one()]);
    let h = RationalMap::new(den.pow(2), ipoly::<S>(&[1, 0, 1]).pow(2))?;
    Ok((RationalMap::new(num, den)?, h))
}

fn kw<S: Scalar>(id: FamilyId, p: &ParamSet<S>) -> Result<(RationalMap<S>, RationalMap<S>)> {
    let (a, b, sigma) = (p.require(id, "a")?, p.require(id, "b")?, p.require(id, "sigma")?);
    if !(is_real(&a) && is_real(&b)) {
        return Err(invalid(id, "a, b real"));
    }
    let one = S::one();
    if !(distinct(&a, &one) && distinct(&b, &one)) {
        return Err(invalid(id, "a != 1, b != 1"));
    }
    if !distinct(&a, &b) {
        return Err(invalid(id, "a != b"));
    }
    if !is_nonzero(&sigma) || !is_real(&(S::i() * sigma.clone())) {
        return Err(invalid(id, "sigma in iR minus {0}"));
    }
    let q = a.clone() * b.clone() * int(16) - a.clone() * int(11) - b.clone() * int(5);
    if !is_nonzero(&q) {
        return Err(invalid(id, "16ab-11a-5b != 0"));
    }
    let rhs = (a.clone() * int(5) + b.clone() * int(11) - int(16)) / q;
    if !agrees(&(sigma.clone() * sigma.clone()), &rhs) {
        return Err(invalid(id, "sigma^2 = (5a+11b-16)/(16ab-11a-5b)"));
    }
    if !(rhs.to_c64().re < 0.0) {
        return Err(invalid(id, "sigma^2 < 0"));
    }
    let ba = b.clone() - a.clone();
    let b1 = (b - one) * int(4);
    let num = Poly::new(vec![
        a.clone() * b1.clone(),
        S::zero(),
        a * b1.clone(),
        S::zero(),
        ba.clone(),
    ])
    .scale(&sigma);
    let den = Poly::new(vec![b1.clone(), S::zero(), b1, S::zero(), ba]);
    let h = RationalMap::new(
        den.pow(2),
        &Poly::monomial(S::one(), 2) * &ipoly::<S>(&[1, 0, 1]).pow(2),
    )?;
    Ok((RationalMap::new(num, den)?, h))
}

fn p49<S: Scalar>(id: FamilyId, p: &ParamSet<S>) -> Result<(RationalMap<S>, RationalMap<S>)> {
    let get = |n: &str| p.require(id, n);
    let (sigma, b1, b2, theta) = (get("sigma")?, get("b1")?, get("b2")?, get("theta")?);
    if !(distinct(&sigma, &b1) && distinct(&sigma, &b2) && distinct(&b1, &b2)) {
        return Err(invalid(id, "sigma, b1, b2 pairwise distinct"));
    }
    if !is_nonzero(&theta) {
        return Err(invalid(id, "theta != 0"));
    }
    let (num, den) = p49_gauss_parts(&sigma, &b1, &b2);
    let h = omega_shape(5, &theta, &den, &S::zero())?;
    Ok((RationalMap::new(num, den)?, h))
}

/// Assembles the Gauss map, height form and domain of a family.
pub fn build<S: Scalar>(id: FamilyId, params: &ParamSet<S>) -> Result<FamilyInstance<S>> {
    let dom = family_domain::<S>(id);
    let (g, data) = if id.is_canonical() {
        (canonical_map::<S>(id)?, None)
    } else {
        let (g, h) = match id {
            FamilyId::Ms => ms(id, params)?,
            FamilyId::Kw => kw(id, params)?,
            FamilyId::P49W5 => p49(id, params)?,
            _ => {
                let (case, variant) = id.case_variant().expect("four-ended family");
                let get = |n: &str| params.require(id, n);
                let (sigma, tau, b, theta) = (get("sigma")?, get("tau")?, get("b")?, get("theta")?);
                t47_checks(id, &sigma, &tau, &b, &theta)?;
                let (num, den) = case_gauss_parts(case, &sigma, &tau, &b)?;
                let h = omega_shape(variant, &theta, &den, &S::zero())?;
                (RationalMap::new(num, den)?, h)
            }
        };
        let data = WeierstrassData::new(g.clone(), OneForm::new(h)?, dom.clone())?;
        (g, Some(data))
    };
    Ok(FamilyInstance {
        id,
        params: params.clone(),
        g,
        dom,
        data,
        expected: Expected::of(id),
    })
}

/// Data pulled back along `z ↦ -z`.
pub fn pullback_neg_z<S: Scalar>(data: &WeierstrassData<S>) -> Result<WeierstrassData<S>> {
    data.pullback(&MoebiusMap::new(-S::one(), S::zero(), S::zero(), S::one())?)
}

/// Two ω variants related by a coordinate change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub case: u8,
    pub from: u8,
    pub to: u8,
    /// `z = M(w)` as `(a, b, c, d)` with Gaussian-integer entries `[re, im]`.
    pub coordinate: [[i64; 2]; 4],
    pub swap_sigma_tau: bool,
    /// `θ' = k θ` with `k = [re, im]`.
    pub theta_factor: [i64; 2],
}

impl Equivalence {
    pub fn coordinate_map<S: Scalar>(&self) -> Result<MoebiusMap<S>> {
        let c = |k: usize| int::<S>(self.coordinate[k][0]) + S::i() * int(self.coordinate[k][1]);
        MoebiusMap::new(c(0), c(1), c(2), c(3))
    }

    /// Parameters of the `to` variant matching `params` of the `from` variant.
    pub fn transform_params<S: Scalar>(&self, params: &ParamSet<S>) -> Result<ParamSet<S>> {
        let id = FamilyId::T47C1W1;
        let mut out = params.clone();
        if self.swap_sigma_tau {
            out.insert("sigma", params.require(id, "tau")?);
            out.insert("tau", params.require(id, "sigma")?);
        }
        let k = int::<S>(self.theta_factor[0]) + S::i() * int(self.theta_factor[1]);
        out.insert("theta", params.require(id, "theta")? * k);
        Ok(out)
    }
}

/// Variants that reduce to others, so that only the remaining ones need
/// separate period analysis.
pub fn variant_equivalences() -> Vec<Equivalence> {
    let neg = [[-1, 0], [0, 0], [0, 0], [1, 0]];
    let e = |from, to, k| Equivalence {
        case: 1,
        from,
        to,
        coordinate: neg,
        swap_sigma_tau: false,
        theta_factor: [k, 0],
    };
    vec![
        e(4, 3, -1),
        e(7, 6, -1),
        e(10, 9, 1),
        Equivalence {
            case: 4,
            from: 8,
            to: 5,
            // z = i(w + i)/(w - i)
            coordinate: [[0, 1], [-1, 0], [1, 0], [0, -1]],
            swap_sigma_tau: true,
            theta_factor: [0, -2],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExactComplex as E;
    use crate::families::params::{exact_example_params, example_params};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn every_worked_example_builds() {
        for id in FamilyId::ALL {
            let inst = build(id, &example_params(id).unwrap()).unwrap();
            assert_eq!(inst.g.degree(), if id == FamilyId::Ms { 2 } else { 4 }, "{id}");
            assert_eq!(inst.data.is_some(), !id.is_canonical());
        }
        for id in FamilyId::ALL {
            if let Some(p) = exact_example_params(id) {
                build(id, &p).unwrap();
            }
        }
    }

    #[test]
    fn t47_case1_omega_matches_the_display() {
        let p = example_params(FamilyId::T47C1W1).unwrap();
        let inst = build(FamilyId::T47C1W1, &p).unwrap();
        let s = p.get("sigma").unwrap();
        let b = p.get("b").unwrap();
        let z = c(0.3, -0.7);
        let q = 2.0 * z * z + 1.0;
        let d = b * q * q - s;
        let h = d * d / (z * z * (z - c(0.0, 1.0)).powi(2) * (z + c(0.0, 1.0)).powi(2));
        let hv = inst.data.unwrap().h().value_c64(z);
        assert!((hv - h).norm() < 1e-12 * h.norm());
        let g = (s * b * q * q - b * s) / d;
        assert!((inst.g.value_c64(z) - g).norm() < 1e-12 * g.norm());
    }

    #[test]
    fn invalid_parameters_name_the_predicate() {
        let err = |id, p: &ParamSet<Complex64>| match build(id, p) {
            Err(Error::InvalidParams { predicate, .. }) => predicate,
            other => panic!("{other:?}"),
        };
        let mut p = example_params(FamilyId::Ms).unwrap();
        p.insert("a", c(1.0, 0.0));
        assert_eq!(err(FamilyId::Ms, &p), "(a-1)(t-1) != 0");
        p.insert("a", c(-1.0, 0.0));
        p.insert("sigma", c(0.5, 0.0));
        assert_eq!(err(FamilyId::Ms, &p), "sigma^2 = (t+3)/(a((t-1)a+4))");
        let mut k = example_params(FamilyId::Kw).unwrap();
        k.insert("b", c(0.0, 0.0));
        assert_eq!(err(FamilyId::Kw, &k), "a != b");
        let mut t = example_params(FamilyId::T47C1W1).unwrap();
        t.insert("b", c(0.0, 0.0));
        assert_eq!(err(FamilyId::T47C1W1, &t), "sigma, tau, b pairwise distinct");
        let mut t = example_params(FamilyId::T47C1W1).unwrap();
        t.insert("theta", c(0.0, 0.0));
        assert_eq!(err(FamilyId::T47C1W1, &t), "theta != 0");
        let mut t = example_params(FamilyId::T47C1W1).unwrap();
        t.remove("tau");
        assert_eq!(err(FamilyId::T47C1W1, &t), "parameter tau is required");
    }

    #[test]
    fn ms_sigma_sign_condition() {
        // a = 3, t = -1: σ² = 2/(3·(-6+4)) = -1/3
        let p = ParamSet::new()
            .with("a", E::from_ints(3, 0))
            .with("t", E::from_ints(-1, 0))
            .with("sigma", E::i() * E::from_ratio(1, 3));
        assert!(matches!(
            build(FamilyId::Ms, &p),
            Err(Error::InvalidParams { .. })
        ));
        // a = 1/2, t = -5: σ² = -2/(½(-3+4)) = -4
        let p = ParamSet::new()
            .with("a", E::from_ratio(1, 2))
            .with("t", E::from_ints(-5, 0))
            .with("sigma", E::from_ints(0, 2));
        assert_eq!(build(FamilyId::Ms, &p).unwrap().g.degree(), 2);
        // σ² > 0 is rejected even when the equation holds
        let p = ParamSet::new()
            .with("a", E::from_ints(1, 0) + E::from_ints(1, 0))
            .with("t", E::from_ints(-3, 0) + E::from_ints(4, 0))
            .with("sigma", E::one());
        assert!(build(FamilyId::Ms, &p).is_err());
    }

    #[test]
    fn gauss_maps_are_moebius_conjugates_of_the_canonical_quartic() {
        // g = Φ⁻¹ ∘ G with Φ(w) = (τ-b)/(τ-σ) · (w-σ)/(w-b)
        let p = example_params(FamilyId::T47C4W5).unwrap();
        let (s, t, b) = (
            *p.get("sigma").unwrap(),
            *p.get("tau").unwrap(),
            *p.get("b").unwrap(),
        );
        let g = build(FamilyId::T47C4W5, &p).unwrap().g;
        let gc = build::<Complex64>(FamilyId::CanonG42, &ParamSet::new())
            .unwrap()
            .g;
        for k in 0..7 {
            let z = c(0.2 + 0.3 * k as f64, 0.5 - 0.1 * k as f64);
            let w = g.value_c64(z);
            let phi = (t - b) / (t - s) * (w - s) / (w - b);
            assert!((phi - gc.value_c64(z)).norm() < 1e-10 * (1.0 + phi.norm()));
        }
    }

    #[test]
    fn sign_flip_equivalences_hold_exactly() {
        let p = exact_example_params(FamilyId::T47C1W1).unwrap();
        for eq in variant_equivalences() {
            let from = t47_data::<E>(eq.case, eq.from, &p).unwrap();
            let moved = from.pullback(&eq.coordinate_map().unwrap()).unwrap();
            let to = t47_data::<E>(eq.case, eq.to, &eq.transform_params(&p).unwrap()).unwrap();
            assert_eq!(moved.g, to.g, "{eq:?}");
            assert_eq!(moved.h(), to.h(), "{eq:?}");
            for q in to.dom.punctures() {
                assert!(moved.dom.contains_puncture(q));
            }
        }
    }

    #[test]
    fn kw_is_a_specialisation_of_variant_two() {
        // τ → σ, σ → σa, b → σb, then z ↦ 1/z
        let kwp = example_params(FamilyId::Kw).unwrap();
        let (a, b, s) = (
            *kwp.get("a").unwrap(),
            *kwp.get("b").unwrap(),
            *kwp.get("sigma").unwrap(),
        );
        let t = ParamSet::new()
            .with("tau", s)
            .with("sigma", s * a)
            .with("b", s * b)
            .with("theta", c(1.0, 0.0));
        let g2 = build(FamilyId::T47C1W2, &t).unwrap().g;
        let gk = build(FamilyId::Kw, &kwp).unwrap().g;
        for k in 0..10 {
            let z = c(0.37 + 0.21 * k as f64, -0.8 + 0.17 * k as f64);
            let lhs = g2.value_c64(1.0 / z);
            let rhs = gk.value_c64(z);
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn domains() {
        let d = family_domain::<E>(FamilyId::CanonG211);
        assert!(d.contains_puncture(&fin(0, -17)));
        assert_eq!(family_domain::<E>(FamilyId::Ms).len(), 3);
        assert!(omega_shape::<E>(11, &E::one(), &Poly::one(), &E::zero()).is_err());
    }
}
