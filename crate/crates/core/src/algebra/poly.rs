//! Dense univariate polynomials, coefficients lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::exact::ExactComplex;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A polynomial with no trailing (leading-degree) exact zeros.
///
/// The zero polynomial has an empty coefficient list and `degree() == None`.
#[derive(Clone, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn x() -> Self {
        Poly::new(vec![S::zero(), S::one()])
    }

    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `z - a`.
    pub fn linear_root(a: &S) -> Self {
        Poly::new(vec![-a.clone(), S::one()])
    }

    /// Monic polynomial with the given roots (repeated as listed).
    pub fn from_roots(roots: &[S]) -> Self {
        roots
            .iter()
            .fold(Poly::one(), |acc, r| &acc * &Poly::linear_root(r))
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_c64();
        }
        acc
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &S) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = S::one() / l.clone();
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::ZeroDenominator)?;
        let Some(n) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if n < dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![S::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dj.clone();
            }
            // The eliminated coefficient is zero by construction.
            rem[k + dd] = S::zero();
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Division by `z - a`, returning quotient and the remainder `p(a)`.
    pub fn deflate(&self, a: &S) -> (Self, S) {
        let n = self.coeffs.len();
        if n == 0 {
            return (Poly::zero(), S::zero());
        }
        let mut q = vec![S::zero(); n - 1];
        let mut acc = S::zero();
        for k in (0..n).rev() {
            acc = acc * a.clone() + self.coeffs[k].clone();
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        (Poly::new(q), acc)
    }

    /// Taylor shift: the polynomial `u ↦ p(a + u)`.
    pub fn shift(&self, a: &S) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = c[j + 1].clone() * a.clone();
                c[j] = c[j].clone() + t;
            }
        }
        Poly::new(c)
    }

    /// `z^n p(1/z)` for `n >= deg p`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut v = vec![S::zero(); n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            assert!(k <= n, "reversal length below degree");
            v[n - k] = c.clone();
        }
        Poly::new(v)
    }

    /// `p(q(z))` by Horner.
    pub fn compose(&self, q: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Drops leading coefficients that are negligible relative to the largest one.
    pub fn cleaned(&self) -> Self {
        let scale = self.max_norm();
        let mut v = self.coeffs.clone();
        while v.last().is_some_and(|c| c.negligible(scale)) {
            v.pop();
        }
        Poly::new(v)
    }

    /// Number of leading low-order coefficients that vanish (order at 0).
    pub fn low_order(&self) -> usize {
        let scale = self.max_norm();
        self.coeffs.iter().take_while(|c| c.negligible(scale)).count()
    }

    /// Order of vanishing at `a`, counted by repeated deflation.
    ///
    /// Floating remainders count as zero when small relative to the
    /// evaluation scale `Σ|c_k||a|^k`.
    pub fn order_at(&self, a: &S) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let mut p = self.clone();
        let mut k = 0;
        let r = a.norm();
        while !p.is_zero() {
            let scale: f64 = p
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.norm() * r.powi(j as i32))
                .sum();
            let (q, rem) = p.deflate(a);
            let vanishes = if S::EXACT {
                rem.is_zero()
            } else {
                rem.norm() <= 1e-9 * scale.max(f64::MIN_POSITIVE)
            };
            if !vanishes {
                break;
            }
            k += 1;
            p = q;
        }
        k
    }

    pub fn to_c64(&self) -> Poly<Complex64> {
        Poly::new(self.coeffs.iter().map(|c| c.to_c64()).collect())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| {
            let z = c.to_c64();
            z.re.is_finite() && z.im.is_finite()
        })
    }
}

impl Poly<ExactComplex> {
    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `p = c * Π f_k^k` with each `f_k`
    /// monic, square-free and pairwise coprime. Factors of degree 0 are dropped.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).unwrap().0;
        let c = df.div_rem(&a0).unwrap().0;
        let mut d = &c - &b.derivative();
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            let nb = b.div_rem(&a).unwrap().0;
            let nc = d.div_rem(&a).unwrap().0;
            d = &nc - &nb.derivative();
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, k));
            }
            b = nb;
            k += 1;
        }
        out
    }
}

impl<S: Scalar> Add<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<S: Scalar> Sub<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<S: Scalar> Mul<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: &Poly<S>) -> Poly<S> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![S::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<S: Scalar> Add for Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: Poly<S>) -> Poly<S> {
        &self + &o
    }
}

impl<S: Scalar> Sub for Poly<S> {
    type Output = Poly<S>;
    fn sub(self, o: Poly<S>) -> Poly<S> {
        &self - &o
    }
}

impl<S: Scalar> Mul for Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: Poly<S>) -> Poly<S> {
        &self * &o
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -&self
    }
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c:?})")?,
                1 => write!(f, "({c:?})z")?,
                _ => write!(f, "({c:?})z^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = ExactComplex;

    fn ep(v: &[(i64, i64)]) -> Poly<E> {
        Poly::new(v.iter().map(|&(a, b)| E::from_ints(a, b)).collect())
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let z: Poly<E> = Poly::new(vec![E::zero(), E::zero()]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(ep(&[(3, 0)]).degree(), Some(0));
    }

    #[test]
    fn division_identity() {
        let a = ep(&[(1, 2), (0, -3), (5, 0), (1, 1)]);
        let b = ep(&[(2, 0), (0, 1)]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
        assert_eq!(a.div_rem(&Poly::zero()), Err(Error::ZeroDenominator));
    }

    #[test]
    fn shift_matches_composition() {
        let p = ep(&[(1, 0), (2, 1), (0, 0), (-1, 3)]);
        let a = E::from_ints(2, -1);
        let comp = p.compose(&Poly::new(vec![a.clone(), E::one()]));
        assert_eq!(p.shift(&a), comp);
    }

    #[test]
    fn gcd_and_yun() {
        // (z - i)^3 (z + 17i) (z^2 + 1/2)^2
        let f1 = Poly::from_roots(&[E::i()]);
        let f2 = Poly::from_roots(&[E::from_ints(0, -17)]);
        let f3 = ep(&[(1, 0), (0, 0), (2, 0)]).monic();
        let p = &(&f1.pow(3) * &f2) * &f3.pow(2);
        let sq = p.squarefree_decomposition();
        assert_eq!(sq.len(), 3);
        assert_eq!(sq[0], (f2, 1));
        assert_eq!(sq[1], (f3, 2));
        assert_eq!(sq[2], (f1.clone(), 3));
        assert_eq!(p.gcd(&f1), f1);
    }

    #[test]
    fn order_at_exact_and_float() {
        let p = &Poly::from_roots(&[E::i(), E::i(), E::one()]) * &ep(&[(7, 0)]);
        assert_eq!(p.order_at(&E::i()), 2);
        assert_eq!(p.order_at(&E::one()), 1);
        assert_eq!(p.order_at(&E::zero()), 0);
        let pf = p.to_c64();
        assert_eq!(pf.order_at(&Complex64::new(0.0, 1.0)), 2);
    }

    #[test]
    fn reversal_is_infinity_chart() {
        let p = ep(&[(1, 0), (2, 0), (3, 0)]);
        assert_eq!(p.reversed(4), ep(&[(0, 0), (0, 0), (3, 0), (2, 0), (1, 0)]));
    }
}
