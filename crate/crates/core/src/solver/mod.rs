//! Multistart Levenberg–Marquardt on the period constraint systems, and
//! end-to-end certification of the points it finds.

mod lm;
mod system;
mod verify;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::families::ParamSet;
use crate::weierstrass::DEFAULT_PERIOD_TOL;

pub use lm::{fd_step, jacobian, levenberg_marquardt, LmParams, Run, Termination};
pub use system::{ConstraintSystem, FreeVar, Target};
pub use verify::{verify_solution, verify_solution_with, Certificate, Observed, Verdict};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub starts: usize,
    pub seed: u64,
    /// Initial damping and the factors applied after accepted and rejected steps.
    pub lambda0: f64,
    pub lambda_down: f64,
    pub lambda_up: f64,
    /// Every free coordinate stays in `[lo, hi]`.
    pub box_bounds: (f64, f64),
    /// Used as start 0 when present.
    pub initial: Option<ParamSet<Complex64>>,
    /// Period tolerance of the certificate.
    pub verify_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iterations: 500,
            residual_tol: 1e-10,
            starts: 64,
            seed: 0,
            lambda0: 1e-3,
            lambda_down: 3.0,
            lambda_up: 4.0,
            box_bounds: (-3.0, 3.0),
            initial: None,
            verify_tol: DEFAULT_PERIOD_TOL,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.box_bounds;
        if !(self.residual_tol > 0.0) {
            return Err(Error::ConfigError("residual_tol must be positive".into()));
        }
        if self.starts == 0 {
            return Err(Error::ConfigError("at least one start is needed".into()));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::ConfigError(format!("bad box [{lo}, {hi}]")));
        }
        if !(self.lambda_down > 1.0 && self.lambda_up > 1.0 && self.lambda0 > 0.0) {
            return Err(Error::ConfigError("bad damping schedule".into()));
        }
        Ok(())
    }

    /// Reads `tol`, `starts`, `seed`, `max_iter`, `box` and `start` from a solve spec.
    pub fn from_json(v: &Value) -> Result<Self> {
        let mut c = SolveConfig::default();
        let num = |k: &str| v.get(k).and_then(Value::as_f64);
        if let Some(t) = num("tol") {
            c.residual_tol = t;
        }
        if let Some(s) = v.get("starts") {
            c.starts =
                s.as_u64()
                    .ok_or_else(|| Error::Parse("starts must be a count".into()))? as usize;
        }
        if let Some(s) = v.get("seed") {
            c.seed = s
                .as_u64()
                .ok_or_else(|| Error::Parse("seed must be an unsigned integer".into()))?;
        }
        if let Some(s) = v.get("max_iter") {
            c.max_iterations =
                s.as_u64()
                    .ok_or_else(|| Error::Parse("max_iter must be a count".into()))? as usize;
        }
        if let Some(b) = v.get("box") {
            match b
                .as_array()
                .map(|a| a.iter().map(Value::as_f64).collect::<Vec<_>>())
            {
                Some(a) if a.len() == 2 && a.iter().all(Option::is_some) => {
                    c.box_bounds = (a[0].unwrap(), a[1].unwrap())
                }
                _ => return Err(Error::Parse("box must be [lo, hi]".into())),
            }
        }
        if let Some(s) = v.get("start") {
            c.initial = Some(ParamSet::from_json(s)?);
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    /// No start reached the tolerance. A heuristic verdict, not a proof.
    Infeasible,
    /// Some start was still descending when it ran out of iterations, or
    /// reached the tolerance at a point that failed certification.
    MaxIter,
}

#[derive(Clone, Debug, Serialize)]
pub struct StartSummary {
    pub index: usize,
    pub residual_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub heuristic: bool,
    #[serde(serialize_with = "ser_params")]
    pub params: ParamSet<Complex64>,
    pub x: Vec<f64>,
    pub residual_norm: f64,
    /// Index of the start that produced `params`.
    pub best_start: usize,
    pub converged_starts: usize,
    pub certificate: Option<Certificate>,
    pub note: String,
    pub starts: Vec<StartSummary>,
}

fn ser_params<Z: serde::Serializer>(p: &ParamSet<Complex64>, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    p.to_json().serialize(s)
}

/// Start `index`: the configured initial point for 0, otherwise uniform in the box.
fn start_point(sys: &ConstraintSystem, cfg: &SolveConfig, index: usize) -> Result<Vec<f64>> {
    if index == 0 {
        if let Some(p) = &cfg.initial {
            return sys.vector_of(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let (lo, hi) = cfg.box_bounds;
    Ok((0..sys.dim()).map(|_| rng.random_range(lo..hi)).collect())
}

fn by_residual(runs: &[Run]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| {
        runs[a]
            .residual_norm
            .total_cmp(&runs[b].residual_norm)
            .then(a.cmp(&b))
    });
    order
}

/// Multistart minimisation of `‖residual‖²`; `Solved` only with a passing certificate.
pub fn solve(sys: &ConstraintSystem, cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if sys.free.is_empty() {
        return Err(Error::ConfigError("the free-parameter mask is empty".into()));
    }
    let params = LmParams {
        max_iterations: cfg.max_iterations,
        residual_tol: cfg.residual_tol,
        lambda0: cfg.lambda0,
        lambda_down: cfg.lambda_down,
        lambda_up: cfg.lambda_up,
        lambda_max: 1e16,
        lo: cfg.box_bounds.0,
        hi: cfg.box_bounds.1,
    };
    let starts: Vec<Vec<f64>> = (0..cfg.starts)
        .map(|k| start_point(sys, cfg, k))
        .collect::<Result<_>>()?;
    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|x0| levenberg_marquardt(sys, x0, &params))
        .collect();
    let order = by_residual(&runs);
    let converged: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&k| runs[k].termination == Termination::Converged)
        .collect();

    let mut chosen = order[0];
    let mut certificate = None;
    let mut status;
    let note;
    if converged.is_empty() {
        let descending = runs.iter().any(|r| r.termination == Termination::IterLimit);
        status = if descending {
            SolveStatus::MaxIter
        } else {
            SolveStatus::Infeasible
        };
        note = if descending {
            "no start reached the tolerance; some were still descending at the iteration limit".into()
        } else {
            format!(
                "no start reached the tolerance; best residual {:.3e} (heuristic verdict)",
                runs[chosen].residual_norm
            )
        };
    } else {
        status = SolveStatus::MaxIter;
        let mut why = String::new();
        match sys.target.family() {
            None => why = "this system has no instance to certify".into(),
            Some(id) => {
                for &k in &converged {
                    let p = sys.params(&runs[k].x)?;
                    match verify_solution(id, &p, cfg.verify_tol) {
                        Ok(c) if c.passed => {
                            chosen = k;
                            certificate = Some(c);
                            status = SolveStatus::Solved;
                            break;
                        }
                        Ok(c) if why.is_empty() => {
                            why = format!(
                                "certificate failed: {:?}",
                                c.verdicts
                                    .iter()
                                    .filter(|v| !v.holds)
                                    .map(|v| v.name)
                                    .collect::<Vec<_>>()
                            );
                            certificate = Some(c);
                            chosen = k;
                        }
                        Err(e) if why.is_empty() => {
                            why = format!("certificate failed: {e}");
                            chosen = k;
                        }
                        _ => {}
                    }
                }
            }
        }
        note = if status == SolveStatus::Solved {
            format!(
                "{} of {} starts reached the tolerance",
                converged.len(),
                runs.len()
            )
        } else {
            format!("converged without a passing certificate; {why}")
        };
    }
    let best = &runs[chosen];
    Ok(SolveResult {
        status,
        heuristic: status == SolveStatus::Infeasible,
        params: sys.params(&best.x)?,
        x: best.x.clone(),
        residual_norm: best.residual_norm,
        best_start: chosen,
        converged_starts: converged.len(),
        certificate,
        note,
        starts: runs
            .iter()
            .enumerate()
            .map(|(index, r)| StartSummary {
                index,
                residual_norm: r.residual_norm,
                iterations: r.iterations,
                termination: r.termination,
            })
            .collect(),
    })
}

/// Parses a full solve spec (system and config) and runs it.
pub fn solve_json(v: &Value) -> Result<SolveResult> {
    let sys = ConstraintSystem::from_json(v)?;
    let cfg = SolveConfig::from_json(v)?;
    solve(&sys, &cfg)
}
