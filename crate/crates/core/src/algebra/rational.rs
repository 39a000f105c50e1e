use std::fmt;

use num_complex::Complex64;

use super::poly::Poly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Clone, PartialEq)]
pub enum SpherePoint<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> SpherePoint<S> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn to_c64(&self) -> SpherePoint<Complex64> {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.to_c64()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }
}

impl SpherePoint<Complex64> {
    /// Classifies a projective pair `[n : d]`.
    pub fn from_projective(n: Complex64, d: Complex64) -> Self {
        let q = n / d;
        if d.norm() == 0.0 || !q.re.is_finite() || !q.im.is_finite() {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(q)
        }
    }

    pub fn is_finite_value(&self) -> bool {
        match self {
            SpherePoint::Finite(z) => z.re.is_finite() && z.im.is_finite(),
            SpherePoint::Infinity => true,
        }
    }
}

impl serde::Serialize for SpherePoint<Complex64> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self {
            SpherePoint::Finite(z) => [z.re, z.im].serialize(s),
            SpherePoint::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Relative distance used to identify numeric values on the sphere:
/// `|v - w| / (1 + max(|v|, |w|))` for finite values and `1 / (1 + |v|)`
/// between a finite value and ∞.
pub fn value_distance(a: &SpherePoint<Complex64>, b: &SpherePoint<Complex64>) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(v), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(v)) => {
            1.0 / (1.0 + v.norm())
        }
        (SpherePoint::Finite(v), SpherePoint::Finite(w)) => (v - w).norm() / (1.0 + v.norm().max(w.norm())),
    }
}

impl<S: Scalar> fmt::Debug for SpherePoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{z:?}"),
            SpherePoint::Infinity => write!(f, "∞"),
        }
    }
}

impl<S: Scalar> fmt::Display for SpherePoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `num / den` with a monic denominator.
///
/// Exact scalars are kept coprime. Floating maps are only made monic:
/// no cancellation is attempted, so callers must not rely on coprimality.
#[derive(Clone, PartialEq)]
pub struct RationalMap<S> {
    num: Poly<S>,
    den: Poly<S>,
}

impl<S: Scalar> RationalMap<S> {
    pub fn new(num: Poly<S>, den: Poly<S>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !num.is_finite() || !den.is_finite() {
            return Err(Error::NonFinite("rational map coefficients".into()));
        }
        if num.is_zero() {
            return Ok(RationalMap {
                num,
                den: Poly::one(),
            });
        }
        let (num, den) = match S::poly_gcd(&num, &den) {
            Some(g) if !g.is_constant() => (num.div_rem(&g)?.0, den.div_rem(&g)?.0),
            _ => (num, den),
        };
        let lead = den.leading().unwrap().clone();
        let inv = S::one() / lead;
        Ok(RationalMap {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: Poly<S>) -> Self {
        RationalMap::new(p, Poly::one()).expect("unit denominator")
    }

    pub fn constant(c: S) -> Self {
        RationalMap::from_poly(Poly::constant(c))
    }

    pub fn identity() -> Self {
        RationalMap::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<S> {
        &self.num
    }

    pub fn den(&self) -> &Poly<S> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `max(deg num, deg den)`, with the zero map of degree 0.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, p: &SpherePoint<S>) -> SpherePoint<S> {
        match p {
            SpherePoint::Infinity => {
                let dn = self.num.degree();
                let dd = self.den.degree().unwrap();
                match dn {
                    None => SpherePoint::Finite(S::zero()),
                    Some(n) if n > dd => SpherePoint::Infinity,
                    Some(n) if n < dd => SpherePoint::Finite(S::zero()),
                    Some(_) => SpherePoint::Finite(
                        self.num.leading().unwrap().clone() / self.den.leading().unwrap().clone(),
                    ),
                }
            }
            SpherePoint::Finite(z) => {
                let d = self.den.eval(z);
                if d.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.num.eval(z) / d)
                }
            }
        }
    }

    /// Projective value `[num : den]` at a point, using the chart at ∞.
    pub fn projective_c64(&self, p: &SpherePoint<Complex64>) -> (Complex64, Complex64) {
        match p {
            SpherePoint::Finite(z) => (self.num.eval_c64(*z), self.den.eval_c64(*z)),
            SpherePoint::Infinity => {
                let d = self.degree();
                (self.num.coeff(d).to_c64(), self.den.coeff(d).to_c64())
            }
        }
    }

    pub fn eval_c64(&self, p: &SpherePoint<Complex64>) -> SpherePoint<Complex64> {
        let (n, d) = self.projective_c64(p);
        SpherePoint::from_projective(n, d)
    }

    /// Plain complex value; poles give non-finite results.
    pub fn value_c64(&self, z: Complex64) -> Complex64 {
        self.num.eval_c64(z) / self.den.eval_c64(z)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RationalMap::new(n, &self.den * &self.den).expect("nonzero denominator")
    }

    /// Numerator of the derivative, `num' den - num den'`.
    pub fn wronskian(&self) -> Poly<S> {
        &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative())
    }

    pub fn scale(&self, c: &S) -> Self {
        RationalMap::new(self.num.scale(c), self.den.clone()).unwrap()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RationalMap::new(n, &self.den * &o.den).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = &(&self.num * &o.den) - &(&o.num * &self.den);
        RationalMap::new(n, &self.den * &o.den).unwrap()
    }

    pub fn mul(&self, o: &Self) -> Self {
        RationalMap::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        RationalMap::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn powi(&self, k: usize) -> Self {
        RationalMap::new(self.num.pow(k), self.den.pow(k)).unwrap()
    }

    /// `self ∘ (a z + b)/(c z + d)`.
    pub fn compose_mobius(&self, a: &S, b: &S, c: &S, d: &S) -> Result<Self> {
        let n = self.degree();
        let top = Poly::new(vec![b.clone(), a.clone()]);
        let bot = Poly::new(vec![d.clone(), c.clone()]);
        let homog = |p: &Poly<S>| {
            let mut acc = Poly::zero();
            for (k, ck) in p.coeffs().iter().enumerate() {
                let term = &(&top.pow(k) * &bot.pow(n - k)) * &Poly::constant(ck.clone());
                acc = &acc + &term;
            }
            acc
        };
        RationalMap::new(homog(&self.num), homog(&self.den))
    }

    /// The map `w ↦ self(1/w)`.
    pub fn at_infinity_chart(&self) -> Self {
        let d = self.degree();
        RationalMap::new(self.num.reversed(d), self.den.reversed(d)).unwrap()
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let n = self.degree();
        let (p, q) = (inner.num(), inner.den());
        let homog = |f: &Poly<S>| {
            let mut acc = Poly::zero();
            for (k, ck) in f.coeffs().iter().enumerate() {
                let term = &(&p.pow(k) * &q.pow(n - k)) * &Poly::constant(ck.clone());
                acc = &acc + &term;
            }
            acc
        };
        RationalMap::new(homog(&self.num), homog(&self.den)).unwrap()
    }

    pub fn to_c64(&self) -> RationalMap<Complex64> {
        RationalMap::new(self.num.to_c64(), self.den.to_c64()).unwrap()
    }
}

impl<S: Scalar> fmt::Debug for RationalMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] / [{:?}]", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExactComplex as E;

    fn ep(v: &[(i64, i64)]) -> Poly<E> {
        Poly::new(v.iter().map(|&(a, b)| E::from_ints(a, b)).collect())
    }

    #[test]
    fn normalize_cancels_common_factor() {
        let r = RationalMap::new(ep(&[(-1, 0), (0, 0), (1, 0)]), ep(&[(-1, 0), (1, 0)])).unwrap();
        assert_eq!(r.num(), &ep(&[(1, 0), (1, 0)]));
        assert_eq!(r.den(), &ep(&[(1, 0)]));
    }

    #[test]
    fn normalize_makes_denominator_monic() {
        let den = ep(&[(1, 0), (0, 0), (2, 0)]).pow(2);
        let r = RationalMap::new(ep(&[(1, 0)]), den).unwrap();
        assert_eq!(r.num(), &Poly::constant(E::from_ratio(1, 4)));
        let half = Poly::new(vec![E::from_ratio(1, 2), E::zero(), E::one()]);
        assert_eq!(r.den(), &half.pow(2));

        let r = RationalMap::new(ep(&[(0, 0), (2, 0)]), ep(&[(2, 0)])).unwrap();
        assert_eq!(r, RationalMap::identity());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RationalMap::new(ep(&[(1, 0)]), Poly::zero()),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn evaluation_on_the_sphere() {
        let g111 = RationalMap::new(ep(&[(1, 0)]), ep(&[(1, 0), (0, 0), (2, 0)]).pow(2)).unwrap();
        assert_eq!(
            g111.eval(&SpherePoint::Finite(E::zero())),
            SpherePoint::Finite(E::one())
        );
        assert_eq!(g111.eval(&SpherePoint::Infinity), SpherePoint::Finite(E::zero()));
        // -4z²/(z²-1)² at i
        let g42 = RationalMap::new(
            ep(&[(0, 0), (0, 0), (-4, 0)]),
            ep(&[(-1, 0), (0, 0), (1, 0)]).pow(2),
        )
        .unwrap();
        assert_eq!(
            g42.eval(&SpherePoint::Finite(E::i())),
            SpherePoint::Finite(E::one())
        );
        let id: RationalMap<E> = RationalMap::identity();
        assert_eq!(id.eval(&SpherePoint::Infinity), SpherePoint::Infinity);
    }

    #[test]
    fn mobius_precomposition_preserves_degree() {
        let g = RationalMap::new(ep(&[(0, 512), (1, 0)]), ep(&[(23, 0), (0, 10), (1, 0)]).pow(2)).unwrap();
        let h = g
            .compose_mobius(
                &E::from_ints(2, 1),
                &E::one(),
                &E::from_ints(0, 1),
                &E::from_ints(3, 0),
            )
            .unwrap();
        assert_eq!(h.degree(), g.degree());
        let z = E::from_ints(1, 2);
        let m = (&(&E::from_ints(2, 1) * &z) + &E::one()) / (&(&E::i() * &z) + &E::from_ints(3, 0));
        assert_eq!(h.eval(&SpherePoint::Finite(z)), g.eval(&SpherePoint::Finite(m)));
    }
}
