use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{roots, ROOT_TOL};
use crate::error::{Error, Result};
use crate::weierstrass::AlphaForm;

type C = Complex64;

/// A straight segment or a circular arc in the chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Path {
    Segment {
        from: C,
        to: C,
    },
    /// Angles in radians; the arc runs from `start` to `end` (either direction).
    Arc {
        center: C,
        radius: f64,
        start: f64,
        end: f64,
    },
}

impl Path {
    pub fn point(&self, t: f64) -> C {
        match *self {
            Path::Segment { from, to } => from + (to - from) * t,
            Path::Arc {
                center,
                radius,
                start,
                end,
            } => center + C::from_polar(radius, start + (end - start) * t),
        }
    }

    pub fn velocity(&self, t: f64) -> C {
        match *self {
            Path::Segment { from, to } => to - from,
            Path::Arc {
                radius, start, end, ..
            } => {
                let a = start + (end - start) * t;
                C::new(0.0, 1.0) * C::from_polar(radius, a) * (end - start)
            }
        }
    }

    pub fn start(&self) -> C {
        self.point(0.0)
    }

    pub fn end(&self) -> C {
        self.point(1.0)
    }

    /// Euclidean distance from `p` to the path.
    pub fn distance_to(&self, p: C) -> f64 {
        match *self {
            Path::Segment { from, to } => {
                let d = to - from;
                let l2 = d.norm_sqr();
                let t = if l2 == 0.0 {
                    0.0
                } else {
                    (((p - from) * d.conj()).re / l2).clamp(0.0, 1.0)
                };
                (p - self.point(t)).norm()
            }
            Path::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let v = p - center;
                let (lo, hi) = if start <= end { (start, end) } else { (end, start) };
                let ends = (p - self.start()).norm().min((p - self.end()).norm());
                if v.norm() == 0.0 {
                    return radius;
                }
                // Smallest angle ≥ lo congruent to arg v.
                let a = lo + (v.arg() - lo).rem_euclid(2.0 * PI);
                if a <= hi {
                    (v.norm() - radius).abs()
                } else {
                    ends
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Two refinement levels must agree to this (relative to 1 + |value|).
    pub tol: f64,
    /// Closest a path may come to a pole of the integrand.
    pub min_distance: f64,
    pub max_depth: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            nodes: 8,
            tol: 1e-10,
            min_distance: 0.05,
            max_depth: 40,
        }
    }
}

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `α` with its finite poles, ready for repeated path integrals.
#[derive(Clone, Debug)]
pub struct Integrand {
    pub alpha: AlphaForm<C>,
    pub poles: Vec<C>,
    rule: (Vec<f64>, Vec<f64>),
    cfg: QuadConfig,
}

impl Integrand {
    pub fn new(alpha: AlphaForm<C>, cfg: QuadConfig) -> Result<Self> {
        if cfg.nodes == 0 || !(cfg.tol > 0.0) {
            return Err(Error::ConfigError(
                "quadrature needs nodes ≥ 1 and tol > 0".into(),
            ));
        }
        let mut poles: Vec<C> = Vec::new();
        for comp in alpha.components() {
            if comp.den().degree().unwrap_or(0) == 0 {
                continue;
            }
            for r in roots(comp.den(), ROOT_TOL)? {
                let z = r.center();
                if !poles.iter().any(|p| (p - z).norm() < 1e-9 * (1.0 + z.norm())) {
                    poles.push(z);
                }
            }
        }
        Ok(Integrand {
            alpha,
            poles,
            rule: gauss_legendre(cfg.nodes),
            cfg,
        })
    }

    pub fn config(&self) -> &QuadConfig {
        &self.cfg
    }

    fn panel(&self, path: &Path, t0: f64, t1: f64) -> [C; 3] {
        let (x, w) = &self.rule;
        let half = 0.5 * (t1 - t0);
        let mid = 0.5 * (t1 + t0);
        let mut acc = [C::new(0.0, 0.0); 3];
        for (xi, wi) in x.iter().zip(w) {
            let t = mid + half * xi;
            let dz = path.velocity(t) * (wi * half);
            let a = self.alpha.eval_c64(path.point(t));
            for k in 0..3 {
                acc[k] += a[k] * dz;
            }
        }
        acc
    }

    fn adapt(&self, path: &Path, t0: f64, t1: f64, whole: [C; 3], depth: usize) -> Result<[C; 3]> {
        let m = 0.5 * (t0 + t1);
        let l = self.panel(path, t0, m);
        let r = self.panel(path, m, t1);
        let fine = [l[0] + r[0], l[1] + r[1], l[2] + r[2]];
        let err = (0..3).map(|k| (fine[k] - whole[k]).norm()).fold(0.0, f64::max);
        let size = fine.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if err <= self.cfg.tol * (1.0 + size) {
            return Ok(fine);
        }
        if depth >= self.cfg.max_depth {
            return Err(Error::ConvergenceFailure(format!(
                "path quadrature near t = {m} (error {err:e})"
            )));
        }
        let a = self.adapt(path, t0, m, l, depth + 1)?;
        let b = self.adapt(path, m, t1, r, depth + 1)?;
        Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
    }

    /// Nearest pole and its distance to the path.
    pub fn clearance(&self, path: &Path) -> Option<(C, f64)> {
        self.poles
            .iter()
            .map(|&p| (p, path.distance_to(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// `∫ α` along `path`.
    pub fn integrate(&self, path: &Path) -> Result<[C; 3]> {
        if let Some((pole, distance)) = self.clearance(path) {
            if distance < self.cfg.min_distance {
                return Err(Error::PathThroughPole {
                    pole: pole.to_string(),
                    distance,
                });
            }
        }
        let whole = self.panel(path, 0.0, 1.0);
        let v = self.adapt(path, 0.0, 1.0, whole, 0)?;
        if v.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("path integral".into()));
        }
        Ok(v)
    }
}

/// `∫ α` along `path` by adaptive composite Gauss–Legendre quadrature.
pub fn integrate_path(alpha: &AlphaForm<C>, path: &Path, cfg: &QuadConfig) -> Result<[C; 3]> {
    Integrand::new(alpha.clone(), *cfg)?.integrate(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Poly, RationalMap};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rm(num: &[C], den: &[C]) -> RationalMap<C> {
        RationalMap::new(Poly::new(num.to_vec()), Poly::new(den.to_vec())).unwrap()
    }

    fn form(a: [RationalMap<C>; 3]) -> AlphaForm<C> {
        let [a1, a2, a3] = a;
        AlphaForm { a1, a2, a3 }
    }

    fn zero() -> RationalMap<C> {
        rm(&[c(0.0, 0.0)], &[c(1.0, 0.0)])
    }

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 8, 13] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for k in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn log_along_the_upper_semicircle() {
        let a = form([zero(), zero(), rm(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)])]);
        let path = Path::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start: 0.0,
            end: PI,
        };
        let v = integrate_path(&a, &path, &QuadConfig::default()).unwrap();
        assert!((v[2] - c(0.0, PI)).norm() < 1e-12);
        assert!(v[2].re.abs() < 1e-12);
    }

    #[test]
    fn exact_primitive_on_a_segment() {
        let one = rm(&[c(1.0, 0.0)], &[c(1.0, 0.0)]);
        let a = form([one, zero(), zero()]);
        let path = Path::Segment {
            from: c(0.0, 0.0),
            to: c(1.0, 1.0),
        };
        let v = integrate_path(&a, &path, &QuadConfig::default()).unwrap();
        assert!((v[0] - c(1.0, 1.0)).norm() < 1e-14);
        assert_eq!(v[1], c(0.0, 0.0));
    }

    #[test]
    fn catenoid_loop_has_purely_imaginary_periods() {
        // α = ½(1 - z², i(1 + z²), 2z) dz / z²
        let z2 = [c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let a = form([
            rm(&[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)], &z2),
            rm(&[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 1.0)], &z2),
            rm(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]),
        ]);
        let path = Path::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start: 0.0,
            end: 2.0 * PI,
        };
        let v = integrate_path(&a, &path, &QuadConfig::default()).unwrap();
        assert!((v[2] - c(0.0, 2.0 * PI)).norm() < 1e-12);
        assert!(v.iter().all(|z| z.re.abs() < 1e-12), "{v:?}");
    }

    #[test]
    fn paths_too_close_to_a_pole_are_refused() {
        let a = form([zero(), zero(), rm(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)])]);
        let path = Path::Segment {
            from: c(-1.0, 0.01),
            to: c(1.0, 0.01),
        };
        let e = integrate_path(&a, &path, &QuadConfig::default()).unwrap_err();
        assert!(matches!(e, Error::PathThroughPole { distance, .. } if (distance - 0.01).abs() < 1e-12));
    }

    #[test]
    fn arc_distance() {
        let arc = Path::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start: 0.0,
            end: PI / 2.0,
        };
        assert!((arc.distance_to(c(2.0, 2.0)) - (8f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((arc.distance_to(c(0.0, -1.0)) - 2f64.sqrt()).abs() < 1e-15);
        let back = Path::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start: PI / 2.0,
            end: 0.0,
        };
        assert!((back.distance_to(c(0.5, 0.5)) - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
    }
}
