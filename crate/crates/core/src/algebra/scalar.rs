use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::exact::ExactComplex;
use super::poly::Poly;

/// Relative size below which a float coefficient counts as cancelled.
pub const APPROX_REL_EPS: f64 = 1e-11;

/// Common interface of the exact and floating scalar fields.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_i64(n: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    /// Exact binary value for exact scalars.
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;
    /// True zero test: exact zero, or a float literally equal to 0.
    fn is_zero(&self) -> bool;
    /// Exact scalars: exact zero. Floats: below `APPROX_REL_EPS * scale`.
    fn negligible(&self, scale: f64) -> bool;

    fn norm(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Greatest common divisor; `None` when the field has no exact gcd.
    fn poly_gcd(_a: &Poly<Self>, _b: &Poly<Self>) -> Option<Poly<Self>> {
        None
    }

    /// Square-free decomposition `[(f_k, k)]`; `None` for floating scalars.
    fn squarefree(_p: &Poly<Self>) -> Option<Vec<(Poly<Self>, usize)>> {
        None
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= APPROX_REL_EPS * scale
    }
}

impl Scalar for ExactComplex {
    const EXACT: bool = true;

    fn zero() -> Self {
        ExactComplex::zero()
    }
    fn one() -> Self {
        ExactComplex::one()
    }
    fn i() -> Self {
        ExactComplex::i()
    }
    fn from_i64(n: i64) -> Self {
        ExactComplex::from_ints(n, 0)
    }
    fn ratio(num: i64, den: i64) -> Self {
        ExactComplex::from_ratio(num, den)
    }
    fn from_c64(z: Complex64) -> Self {
        ExactComplex::from_c64(z).expect("finite float")
    }
    fn to_c64(&self) -> Complex64 {
        ExactComplex::to_c64(self)
    }
    fn conj(&self) -> Self {
        ExactComplex::conj(self)
    }
    fn is_zero(&self) -> bool {
        ExactComplex::is_zero(self)
    }
    fn negligible(&self, _scale: f64) -> bool {
        ExactComplex::is_zero(self)
    }

    fn poly_gcd(a: &Poly<Self>, b: &Poly<Self>) -> Option<Poly<Self>> {
        Some(a.gcd(b))
    }

    fn squarefree(p: &Poly<Self>) -> Option<Vec<(Poly<Self>, usize)>> {
        Some(p.squarefree_decomposition())
    }
}
