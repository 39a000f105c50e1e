use nalgebra::{DMatrix, DVector};

use super::system::ConstraintSystem;
use crate::error::Result;

/// How one Levenberg–Marquardt run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    /// No acceptable step: damping exhausted or steps below resolution.
    Stalled,
    IterLimit,
    /// The start itself was outside the validity domain.
    InvalidStart,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Clone, Copy, Debug)]
pub struct LmParams {
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub lambda0: f64,
    /// Damping is divided by this after an accepted step.
    pub lambda_down: f64,
    /// and multiplied by this after a rejected one.
    pub lambda_up: f64,
    pub lambda_max: f64,
    pub lo: f64,
    pub hi: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn in_box(x: &[f64], lo: f64, hi: f64) -> bool {
    x.iter().all(|t| (lo..=hi).contains(t))
}

/// FD step for coordinate value `t`.
pub fn fd_step(t: f64) -> f64 {
    1e-7 * (1.0 + t.abs())
}

/// Central-difference Jacobian, one-sided where a neighbor is invalid.
pub fn jacobian(sys: &ConstraintSystem, x: &[f64], r0: &[f64]) -> Result<DMatrix<f64>> {
    let m = r0.len();
    let mut j = DMatrix::zeros(m, x.len());
    let mut xp = x.to_vec();
    for k in 0..x.len() {
        let h = fd_step(x[k]);
        xp[k] = x[k] + h;
        let plus = sys.residual(&xp);
        xp[k] = x[k] - h;
        let minus = sys.residual(&xp);
        xp[k] = x[k];
        let col: Vec<f64> = match (plus, minus) {
            (Ok(p), Ok(q)) => p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
            (Ok(p), Err(_)) => p.iter().zip(r0).map(|(a, b)| (a - b) / h).collect(),
            (Err(_), Ok(q)) => r0.iter().zip(&q).map(|(a, b)| (a - b) / h).collect(),
            (Err(e), Err(_)) => return Err(e),
        };
        for (i, v) in col.into_iter().enumerate() {
            j[(i, k)] = v;
        }
    }
    Ok(j)
}

/// Solves `(JᵀJ + λ D) δ = -Jᵀr` with `D` the diagonal of `JᵀJ` floored at 1e-12.
fn damped_step(a: &DMatrix<f64>, g: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let mut m = a.clone();
    for k in 0..m.nrows() {
        m[(k, k)] += lambda * a[(k, k)].max(1e-12);
    }
    let rhs = -g;
    match m.clone().cholesky() {
        Some(c) => Some(c.solve(&rhs)),
        None => m.lu().solve(&rhs),
    }
}

/// Levenberg–Marquardt from `x0`; every accepted point stays valid and in the box.
pub fn levenberg_marquardt(sys: &ConstraintSystem, x0: Vec<f64>, p: &LmParams) -> Run {
    let mut x = x0;
    let mut r = match sys.residual(&x) {
        Ok(r) if in_box(&x, p.lo, p.hi) => r,
        _ => {
            return Run {
                x,
                residual_norm: f64::INFINITY,
                iterations: 0,
                termination: Termination::InvalidStart,
            }
        }
    };
    let mut rn = norm(&r);
    let mut lambda = p.lambda0;
    for it in 0..p.max_iterations {
        if rn < p.residual_tol {
            return Run {
                x,
                residual_norm: rn,
                iterations: it,
                termination: Termination::Converged,
            };
        }
        let j = match jacobian(sys, &x, &r) {
            Ok(j) => j,
            Err(_) => {
                return Run {
                    x,
                    residual_norm: rn,
                    iterations: it,
                    termination: Termination::Stalled,
                }
            }
        };
        let rv = DVector::from_column_slice(&r);
        let a = j.transpose() * &j;
        let g = j.transpose() * rv;
        let mut accepted = false;
        while lambda <= p.lambda_max {
            let Some(d) = damped_step(&a, &g, lambda) else {
                lambda *= p.lambda_up;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + b).collect();
            if xn == x {
                break;
            }
            if in_box(&xn, p.lo, p.hi) {
                if let Ok(rn_vec) = sys.residual(&xn) {
                    let nn = norm(&rn_vec);
                    if nn < rn {
                        x = xn;
                        r = rn_vec;
                        rn = nn;
                        lambda = (lambda / p.lambda_down).max(1e-15);
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= p.lambda_up;
        }
        if !accepted {
            let termination = if rn < p.residual_tol {
                Termination::Converged
            } else {
                Termination::Stalled
            };
            return Run {
                x,
                residual_norm: rn,
                iterations: it,
                termination,
            };
        }
    }
    let termination = if rn < p.residual_tol {
        Termination::Converged
    } else {
        Termination::IterLimit
    };
    Run {
        x,
        residual_norm: rn,
        iterations: p.max_iterations,
        termination,
    }
}
