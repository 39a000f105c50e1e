use crate::algebra::{value_distance, Poly, RationalMap, Scalar, SpherePoint};
use crate::error::{Error, Result};

/// `z ↦ (a z + b) / (c z + d)` with `ad - bc ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMap<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

/// Projective coordinates `(x, y)` with `z = x / y`.
fn proj<S: Scalar>(p: &SpherePoint<S>) -> (S, S) {
    match p {
        SpherePoint::Finite(z) => (z.clone(), S::one()),
        SpherePoint::Infinity => (S::one(), S::zero()),
    }
}

fn det<S: Scalar>(u: &(S, S), v: &(S, S)) -> S {
    u.0.clone() * v.1.clone() - u.1.clone() * v.0.clone()
}

fn from_proj<S: Scalar>(x: S, y: S) -> SpherePoint<S> {
    if y.is_zero() || (!S::EXACT && y.norm() <= 1e-300) {
        SpherePoint::Infinity
    } else {
        SpherePoint::Finite(x / y)
    }
}

/// Point equality: exact for exact scalars, relative distance 1e-12 otherwise.
pub fn same_point<S: Scalar>(p: &SpherePoint<S>, q: &SpherePoint<S>) -> bool {
    if S::EXACT {
        p == q
    } else {
        value_distance(&p.to_c64(), &q.to_c64()) <= 1e-12
    }
}

impl<S: Scalar> MoebiusMap<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Result<Self> {
        let m = MoebiusMap { a, b, c, d };
        let det = m.determinant();
        let scale = [&m.a, &m.b, &m.c, &m.d]
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        if det.is_zero() || (!S::EXACT && det.norm() <= 1e-14 * scale * scale) {
            return Err(Error::Degenerate("Möbius map with ad - bc = 0".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: S::one(),
            b: S::zero(),
            c: S::zero(),
            d: S::one(),
        }
    }

    pub fn determinant(&self) -> S {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn apply(&self, z: &SpherePoint<S>) -> SpherePoint<S> {
        let (x, y) = proj(z);
        let nx = self.a.clone() * x.clone() + self.b.clone() * y.clone();
        let ny = self.c.clone() * x + self.d.clone() * y;
        from_proj(nx, ny)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&inner.a, &inner.b, &inner.c, &inner.d);
        MoebiusMap {
            a: a.clone() * e.clone() + b.clone() * g.clone(),
            b: a.clone() * f.clone() + b.clone() * h.clone(),
            c: c.clone() * e.clone() + d.clone() * g.clone(),
            d: c.clone() * f.clone() + d.clone() * h.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub fn as_map(&self) -> RationalMap<S> {
        RationalMap::new(
            Poly::new(vec![self.b.clone(), self.a.clone()]),
            Poly::new(vec![self.d.clone(), self.c.clone()]),
        )
        .expect("nondegenerate")
    }

    /// Derivative `det / (c z + d)²`.
    pub fn derivative(&self) -> RationalMap<S> {
        let den = Poly::new(vec![self.d.clone(), self.c.clone()]);
        RationalMap::new(Poly::constant(self.determinant()), &den * &den).expect("nondegenerate")
    }

    /// `g ∘ self`.
    pub fn pullback(&self, g: &RationalMap<S>) -> Result<RationalMap<S>> {
        g.compose_mobius(&self.a, &self.b, &self.c, &self.d)
    }

    /// `self ∘ g`.
    pub fn pushforward(&self, g: &RationalMap<S>) -> RationalMap<S> {
        let n = &g.num().scale(&self.a) + &g.den().scale(&self.b);
        let d = &g.num().scale(&self.c) + &g.den().scale(&self.d);
        RationalMap::new(n, d).expect("nondegenerate Möbius image")
    }

    pub fn to_c64(&self) -> MoebiusMap<num_complex::Complex64> {
        MoebiusMap {
            a: self.a.to_c64(),
            b: self.b.to_c64(),
            c: self.c.to_c64(),
            d: self.d.to_c64(),
        }
    }
}

pub fn mobius_apply<S: Scalar>(m: &MoebiusMap<S>, z: &SpherePoint<S>) -> SpherePoint<S> {
    m.apply(z)
}

/// The Möbius map sending `sigma, tau, b` to `0, 1, ∞`.
pub fn canonical_phi<S: Scalar>(
    sigma: &SpherePoint<S>,
    tau: &SpherePoint<S>,
    b: &SpherePoint<S>,
) -> Result<MoebiusMap<S>> {
    if same_point(sigma, tau) || same_point(sigma, b) || same_point(tau, b) {
        return Err(Error::Degenerate(
            "canonical_phi needs three distinct points".into(),
        ));
    }
    let (s, t, q) = (proj(sigma), proj(tau), proj(b));
    // Φ(z) = det(z, σ) det(τ, b) / (det(z, b) det(τ, σ))
    let k1 = det(&t, &q);
    let k2 = det(&t, &s);
    MoebiusMap::new(
        k1.clone() * s.1.clone(),
        -(k1 * s.0.clone()),
        k2.clone() * q.1.clone(),
        -(k2 * q.0.clone()),
    )
}

/// `[z1, z2; z3, z4] = (z1 - z3)/(z1 - z4) · (z2 - z4)/(z2 - z3)`.
pub fn cross_ratio<S: Scalar>(
    z1: &SpherePoint<S>,
    z2: &SpherePoint<S>,
    z3: &SpherePoint<S>,
    z4: &SpherePoint<S>,
) -> Result<SpherePoint<S>> {
    let pts = [z1, z2, z3, z4];
    let mut distinct: Vec<&SpherePoint<S>> = Vec::new();
    for p in pts {
        if !distinct.iter().any(|q| same_point(p, q)) {
            distinct.push(p);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::Degenerate(
            "cross ratio needs three distinct points".into(),
        ));
    }
    let (p1, p2, p3, p4) = (proj(z1), proj(z2), proj(z3), proj(z4));
    let num = det(&p1, &p3) * det(&p2, &p4);
    let den = det(&p1, &p4) * det(&p2, &p3);
    Ok(from_proj(num, den))
}
