//! Polynomial roots with multiplicities.
//!
//! Simultaneous Aberth–Ehrlich iteration, falling back to Laguerre with
//! deflation. Approximations are grouped into clusters by overlapping
//! inclusion disks; exact inputs are first split by square-free
//! decomposition so multiplicities never depend on a threshold.

use num_complex::Complex64;

use super::poly::Poly;
use super::rational::SpherePoint;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Default relative coefficient uncertainty for floating inputs.
pub const ROOT_TOL: f64 = 1e-12;

const MAX_ABERTH_ITERS: usize = 600;

#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    pub location: SpherePoint<Complex64>,
    pub multiplicity: usize,
    /// Radius of a disk around `location` that holds every member root.
    pub radius: f64,
}

impl RootCluster {
    pub fn center(&self) -> Complex64 {
        match self.location {
            SpherePoint::Finite(z) => z,
            SpherePoint::Infinity => Complex64::new(f64::INFINITY, 0.0),
        }
    }
}

/// Roots of `p` grouped by multiplicity. `tol` is the relative uncertainty
/// attributed to floating coefficients.
pub fn roots<S: Scalar>(p: &Poly<S>, tol: f64) -> Result<Vec<RootCluster>> {
    if p.is_zero() {
        return Err(Error::Degenerate("roots of the zero polynomial".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::ConfigError("root tolerance must be positive".into()));
    }
    if let Some(factors) = S::squarefree(p) {
        let mut out = Vec::new();
        for (f, k) in factors {
            let fc = f.to_c64();
            for c in clusters_c64(fc.coeffs(), f64::EPSILON)? {
                if c.multiplicity != 1 {
                    return Err(Error::ConvergenceFailure(
                        "square-free factor produced a multiple root".into(),
                    ));
                }
                out.push(RootCluster { multiplicity: k, ..c });
            }
        }
        sort_clusters(&mut out);
        return Ok(out);
    }
    let pc = p.to_c64();
    let mut out = clusters_c64(pc.coeffs(), tol)?;
    sort_clusters(&mut out);
    Ok(out)
}

fn sort_clusters(v: &mut [RootCluster]) {
    v.sort_by(|a, b| {
        let (x, y) = (a.center(), b.center());
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
}

fn horner_with_bound(c: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut bound = 0.0;
    let r = z.norm();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        bound = bound * r + a.norm();
    }
    (p, dp, bound)
}

fn clusters_c64(coeffs: &[Complex64], tol: f64) -> Result<Vec<RootCluster>> {
    for c in coeffs {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::NonFinite("polynomial coefficients".into()));
        }
    }
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let rest = &coeffs[zeros..];
    let mut out = Vec::new();
    if zeros > 0 {
        out.push(RootCluster {
            location: SpherePoint::Finite(Complex64::new(0.0, 0.0)),
            multiplicity: zeros,
            radius: 0.0,
        });
    }
    let n = rest.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    let approx = match aberth(rest) {
        Some(z) => z,
        None => laguerre_deflation(rest)?,
    };
    out.extend(group(rest, &approx, tol));
    Ok(out)
}

fn aberth(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let center = -c[n - 1] / (lead * n as f64);
    let shifted: Vec<Complex64> = {
        let p = Poly::new(c.to_vec());
        p.shift(&center).into_coeffs()
    };
    let r = if shifted[0].norm() == 0.0 {
        // Every root could sit at the centroid: use a coefficient bound instead.
        (0..n)
            .map(|k| (shifted[k].norm() / lead.norm()).powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-3)
    } else {
        (shifted[0].norm() / lead.norm()).powf(1.0 / n as f64)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(r, t)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ABERTH_ITERS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = horner_with_bound(c, z[i]);
            if p.norm() <= 4.0 * n as f64 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                // Zero derivative or coincident estimates: nudge and retry.
                let nudge = Complex64::new(1e-7, 1e-7) * (1.0 + z[i].norm());
                z[i] += nudge;
                continue;
            }
            z[i] -= w;
            if w.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Some(z);
        }
    }
    None
}

fn laguerre_deflation(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let original = Poly::new(c.to_vec());
    let mut p = original.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let z = laguerre(&p, Complex64::new(0.0, 0.0))?;
        let z = polish_newton(&original, z, 1);
        out.push(z);
        p = p.deflate(&z).0;
    }
    Ok(out)
}

fn laguerre(p: &Poly<Complex64>, mut z: Complex64) -> Result<Complex64> {
    let n = p.degree().unwrap() as f64;
    let d1 = p.derivative();
    let d2 = d1.derivative();
    for it in 0..1000 {
        let pv = p.eval(&z);
        if pv.norm() == 0.0 {
            return Ok(z);
        }
        let g = d1.eval(&z) / pv;
        let h = g * g - d2.eval(&z) / pv;
        let sq = ((h * n - g * g) * (n - 1.0)).sqrt();
        let (a, b) = (g + sq, g - sq);
        let den = if a.norm() >= b.norm() { a } else { b };
        let step = if den.norm() == 0.0 {
            Complex64::from_polar(1.0 + z.norm(), it as f64)
        } else {
            Complex64::new(n, 0.0) / den
        };
        z -= step;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Err(Error::ConvergenceFailure("Laguerre root iteration".into()))
}

/// Newton on the `(m-1)`-th derivative, where an `m`-fold root is simple.
fn polish_newton(p: &Poly<Complex64>, mut z: Complex64, m: usize) -> Complex64 {
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    let dq = q.derivative();
    for _ in 0..8 {
        let d = dq.eval(&z);
        if d.norm() == 0.0 {
            break;
        }
        let step = q.eval(&z) / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Groups approximations whose inclusion disks overlap.
///
/// The disk at `z_i` has radius `n (|p(z_i)| + tol·Σ|a_k||z_i|^k) / |a_n Π_{j≠i}(z_i - z_j)|`;
/// a connected component of `m` overlapping disks holds exactly `m` roots of
/// every polynomial within the coefficient uncertainty.
fn group(c: &[Complex64], z: &[Complex64], tol: f64) -> Vec<RootCluster> {
    let n = z.len();
    let lead = c[n].norm();
    let rho: Vec<f64> = (0..n)
        .map(|i| {
            let (p, _, bound) = horner_with_bound(c, z[i]);
            let uncertainty = p.norm() + (tol + 4.0 * n as f64 * f64::EPSILON) * bound;
            let prod: f64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).norm()).product();
            let r = n as f64 * uncertainty / (lead * prod);
            if r.is_finite() {
                r
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= rho[i] + rho[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let poly = Poly::new(c.to_vec());
    let mut out = Vec::new();
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| find(&mut parent, i) == root).collect();
        if members.is_empty() {
            continue;
        }
        let m = members.len();
        let mean = members.iter().map(|&i| z[i]).sum::<Complex64>() / m as f64;
        let spread = members
            .iter()
            .map(|&i| (z[i] - mean).norm() + rho[i].min(1e300))
            .fold(0.0, f64::max);
        let polished = polish_newton(&poly, mean, m);
        let center = if (polished - mean).norm() <= spread.max(f64::EPSILON * (1.0 + mean.norm())) {
            polished
        } else {
            mean
        };
        out.push(RootCluster {
            location: SpherePoint::Finite(center),
            multiplicity: m,
            radius: spread,
        });
    }
    out
}
