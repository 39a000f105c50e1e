use num_complex::Complex64;
use serde::Serialize;

use super::data::{finite_divisor, function_order, WeierstrassData, POINT_TOL};
use crate::algebra::{Scalar, SpherePoint};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndOrder {
    pub point: SpherePoint<Complex64>,
    /// `ord_p ω - 2 m_p`, with `m_p` the pole order of `g` at `p`.
    pub k: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub regular: bool,
    pub degenerate_points: Vec<SpherePoint<Complex64>>,
    pub complete: bool,
    pub end_orders: Vec<EndOrder>,
}

/// Pole order of `g` at `p` (zero where `g` is finite).
fn pole_order<S: Scalar>(g: &crate::algebra::RationalMap<S>, p: &SpherePoint<S>) -> i64 {
    (-function_order(g, p)).max(0)
}

/// Checks `ord_p ω = 2 m_p` inside the domain and computes the end exponents.
pub fn regularity_and_completeness<S: Scalar>(data: &WeierstrassData<S>) -> Result<MetricReport> {
    let pc = data.dom.to_c64();
    let h = data.h();
    // Signed divisor of ω - 2·(poles of g) on the finite plane.
    let mut div = finite_divisor(h)?;
    for (z, k) in finite_divisor(&data.g)? {
        if k < 0 {
            let p = SpherePoint::Finite(z);
            match div
                .iter_mut()
                .find(|(w, _)| crate::algebra::value_distance(&SpherePoint::Finite(*w), &p) <= POINT_TOL)
            {
                Some(e) => e.1 += 2 * k,
                None => div.push((z, 2 * k)),
            }
        }
    }
    let mut degenerate = Vec::new();
    for (z, k) in div {
        let p = SpherePoint::Finite(z);
        if k != 0 && pc.find_c64(&p, POINT_TOL).is_none() {
            degenerate.push(p);
        }
    }
    let inf = SpherePoint::Infinity;
    if !data.dom.contains_puncture(&inf) && data.omega.order_at(&inf) != 2 * pole_order(&data.g, &inf) {
        degenerate.push(SpherePoint::Infinity);
    }
    let end_orders: Vec<EndOrder> = data
        .dom
        .punctures()
        .iter()
        .map(|p| EndOrder {
            point: p.to_c64(),
            k: data.omega.order_at(p) - 2 * pole_order(&data.g, p),
        })
        .collect();
    Ok(MetricReport {
        regular: degenerate.is_empty(),
        degenerate_points: degenerate,
        complete: end_orders.iter().all(|e| e.k <= -1),
        end_orders,
    })
}

/// `-4 deg g`, in units of π.
pub fn total_curvature<S: Scalar>(data: &WeierstrassData<S>) -> i64 {
    -4 * data.g.degree() as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointGeometry {
    pub curvature: f64,
    pub normal: [f64; 3],
}

/// Inverse stereographic image of a Gauss map value.
pub fn normal_of(g: &SpherePoint<Complex64>) -> [f64; 3] {
    match g {
        SpherePoint::Infinity => [0.0, 0.0, 1.0],
        SpherePoint::Finite(v) => {
            let n2 = v.norm_sqr();
            if !n2.is_finite() || n2 > 1e300 {
                return [0.0, 0.0, 1.0];
            }
            let s = 1.0 + n2;
            [2.0 * v.re / s, 2.0 * v.im / s, (n2 - 1.0) / s]
        }
    }
}

/// Gaussian curvature and unit normal at an interior point.
pub fn pointwise_geometry<S: Scalar>(data: &WeierstrassData<S>, z: Complex64) -> Result<PointGeometry> {
    let g = data.g.to_c64();
    let den = g.den().eval_c64(z);
    let scale = g
        .den()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
        .sum::<f64>();
    if den.norm() <= 1e-12 * scale.max(1.0) {
        return Err(Error::MetricSingular(format!("{z} is a pole of g")));
    }
    let gv = g.value_c64(z);
    let dg = g.derivative().value_c64(z);
    let hv = data.h().to_c64().value_c64(z);
    if hv.norm() == 0.0 || !hv.is_finite() {
        return Err(Error::MetricSingular(format!("ω degenerates at {z}")));
    }
    let s = 1.0 + gv.norm_sqr();
    let curvature = -4.0 * (dg / hv).norm_sqr() / s.powi(4);
    if !curvature.is_finite() {
        return Err(Error::MetricSingular(format!("{z}")));
    }
    Ok(PointGeometry {
        curvature,
        normal: normal_of(&SpherePoint::Finite(gv)),
    })
}
