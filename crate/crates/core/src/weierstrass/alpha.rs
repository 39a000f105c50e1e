use num_complex::Complex64;

use super::data::WeierstrassData;
use crate::algebra::{Poly, RationalMap, Scalar};
use crate::error::Result;

/// Coefficients of `dz` in `α = ½(1 - g², i(1 + g²), 2g) ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaForm<S: Scalar> {
    pub a1: RationalMap<S>,
    pub a2: RationalMap<S>,
    pub a3: RationalMap<S>,
}

impl<S: Scalar> AlphaForm<S> {
    pub fn components(&self) -> [&RationalMap<S>; 3] {
        [&self.a1, &self.a2, &self.a3]
    }

    /// Numerator of `a1² + a2² + a3²` over the common denominator.
    pub fn null_numerator(&self) -> Poly<S> {
        let sq = |r: &RationalMap<S>| r.mul(r);
        let [s1, s2, s3] = [sq(&self.a1), sq(&self.a2), sq(&self.a3)];
        let t1 = &(s1.num() * s2.den()) * s3.den();
        let t2 = &(s2.num() * s1.den()) * s3.den();
        let t3 = &(s3.num() * s1.den()) * s2.den();
        &(&t1 + &t2) + &t3
    }

    /// `|a1² + a2² + a3²|` relative to the size of its terms.
    pub fn null_defect(&self) -> f64 {
        let n = self.null_numerator().to_c64();
        let sq = |r: &RationalMap<S>| r.to_c64().mul(&r.to_c64()).num().max_norm();
        let scale = sq(&self.a1)
            .max(sq(&self.a2))
            .max(sq(&self.a3))
            .max(f64::MIN_POSITIVE);
        n.max_norm() / scale
    }

    pub fn eval_c64(&self, z: Complex64) -> [Complex64; 3] {
        [self.a1.value_c64(z), self.a2.value_c64(z), self.a3.value_c64(z)]
    }

    pub fn to_c64(&self) -> AlphaForm<Complex64> {
        AlphaForm {
            a1: self.a1.to_c64(),
            a2: self.a2.to_c64(),
            a3: self.a3.to_c64(),
        }
    }
}

/// Divides `p` by `q` at most `k` times while the division is exact
/// (negligible remainder for floats).
fn strip<S: Scalar>(p: &Poly<S>, q: &Poly<S>, k: usize) -> (Poly<S>, usize) {
    let mut p = p.clone();
    let mut n = 0;
    if q.is_constant() {
        return (p, 0);
    }
    while n < k {
        let Ok((quo, rem)) = p.div_rem(q) else { break };
        let scale = p.max_norm();
        if rem.coeffs().iter().all(|c| c.negligible(scale)) {
            p = quo;
            n += 1;
        } else {
            break;
        }
    }
    (p, n)
}

pub fn alpha<S: Scalar>(data: &WeierstrassData<S>) -> Result<AlphaForm<S>> {
    let (n, d) = (data.g.num(), data.g.den());
    let h = data.h();
    // h carries the double zeros at the poles of g; divide them out first so
    // floating data does not keep spurious common factors.
    let (hn, k) = strip(h.num(), d, 2);
    let dk = d.pow(2 - k);
    let base_den = &dk * h.den();
    let half = S::ratio(1, 2);
    let n2 = n * n;
    let d2 = d * d;
    let a1 = RationalMap::new((&(&d2 - &n2) * &hn).scale(&half), base_den.clone())?;
    let a2 = RationalMap::new((&(&d2 + &n2) * &hn).scale(&(S::i() * half)), base_den.clone())?;
    let a3 = RationalMap::new(&(n * d) * &hn, base_den)?;
    Ok(AlphaForm { a1, a2, a3 })
}
