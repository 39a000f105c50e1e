use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::check_bounds;
use super::mobius::MoebiusMap;
use super::report::{ser_ratio, tr_report, PuncturedSphere, VALUE_TOL};
use crate::algebra::{ExactComplex, Poly, RationalMap, SpherePoint};
use crate::error::Result;

type E = ExactComplex;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSample {
    pub index: usize,
    pub degree: usize,
    pub n_punctures: usize,
    pub d_g: usize,
    pub r_g: usize,
    pub s_g: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub nu_g: Ratio<i64>,
    /// Names of unconditional bounds that failed.
    pub failed: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub samples: Vec<SuiteSample>,
    pub failures: usize,
    /// Samples attaining `S_g = ⌊dB/(d-1)⌋`.
    pub sharp_s: usize,
    /// Largest `ν_g` seen with `D_g = 0` and degree at most 4.
    #[serde(serialize_with = "ser_ratio")]
    pub max_nu_surjective: Ratio<i64>,
}

fn random_point(rng: &mut ChaCha8Rng) -> E {
    let q = rng.random_range(1..=3);
    let re = E::from_ratio(rng.random_range(-6..=6), q);
    re + E::from_ratio(rng.random_range(-6..=6), q) * E::i()
}

fn fresh_point(rng: &mut ChaCha8Rng, used: &mut Vec<E>) -> E {
    loop {
        let p = random_point(rng);
        if !used.contains(&p) {
            used.push(p.clone());
            return p;
        }
    }
}

/// Random partition of `n`, biased towards large parts.
fn partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut rem = n;
    while rem > 0 {
        let k = if rng.random_bool(0.5) {
            rem
        } else {
            rng.random_range(1..=rem)
        };
        parts.push(k);
        rem -= k;
    }
    parts
}

/// `∏ (z - a)^m` together with its zero set.
fn root_poly(rng: &mut ChaCha8Rng, n: usize, used: &mut Vec<E>) -> (Poly<E>, Vec<E>) {
    let mut p = Poly::one();
    let mut zs = Vec::new();
    for m in partition(rng, n) {
        let a = fresh_point(rng, used);
        p = &p * &Poly::linear_root(&a).pow(m);
        zs.push(a);
    }
    (p, zs)
}

fn small_int(rng: &mut ChaCha8Rng) -> E {
    E::from_ints(rng.random_range(-3..=3), rng.random_range(-2..=2))
}

/// True when `v` has `deg g` distinct preimages.
fn regular_value(g: &RationalMap<E>, v: &E) -> bool {
    let p = g.num() - &g.den().scale(v);
    let d = g.degree();
    match p.degree() {
        Some(k) if k + 1 >= d => p.gcd(&p.derivative()).degree() == Some(0),
        _ => false,
    }
}

/// A random exact map of degree `2..=6` and a punctured sphere.
///
/// Punctures are whole fibers over the zeros or poles of the undeformed map,
/// or regular points of the final map, so no puncture splits a ramified fiber.
pub fn sample_map(rng: &mut ChaCha8Rng) -> (RationalMap<E>, PuncturedSphere<E>) {
    let d = rng.random_range(2..=6);
    let other = rng.random_range(0..=d);
    let mut used = Vec::new();
    let (mut num, mut zeros) = root_poly(rng, d, &mut used);
    let (mut den, mut poles) = root_poly(rng, other, &mut used);
    if rng.random_bool(0.5) {
        std::mem::swap(&mut num, &mut den);
        std::mem::swap(&mut zeros, &mut poles);
    }
    let mut zero_fiber: Vec<SpherePoint<E>> = zeros.into_iter().map(SpherePoint::Finite).collect();
    if num.degree().unwrap() < d {
        zero_fiber.push(SpherePoint::Infinity);
    }
    let mut pole_fiber: Vec<SpherePoint<E>> = poles.into_iter().map(SpherePoint::Finite).collect();
    if den.degree().unwrap() < d {
        pole_fiber.push(SpherePoint::Infinity);
    }
    let base = RationalMap::new(num, den).expect("coprime by construction");
    let m = loop {
        if let Ok(m) = MoebiusMap::new(small_int(rng), small_int(rng), small_int(rng), small_int(rng)) {
            break m;
        }
    };
    let g = m.pushforward(&base);

    let budget = rng.random_range(0..=4);
    let mut punct: Vec<SpherePoint<E>> = Vec::new();
    let mut fibers = vec![zero_fiber, pole_fiber];
    while punct.len() < budget {
        let room = budget - punct.len();
        let pick = rng.random_range(0..3);
        if pick < 2 && !fibers[pick].is_empty() && fibers[pick].len() <= room {
            punct.append(&mut fibers[pick]);
            continue;
        }
        let p = random_point(rng);
        let sp = SpherePoint::Finite(p.clone());
        if punct.contains(&sp) || fibers.iter().flatten().any(|q| *q == sp) {
            continue;
        }
        match g.eval(&sp) {
            SpherePoint::Finite(v) if regular_value(&g, &v) => punct.push(sp),
            _ => {}
        }
    }
    (g, PuncturedSphere::new(punct).expect("distinct punctures"))
}

fn run_one(seed: u64, index: usize) -> Result<SuiteSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let (g, dom) = sample_map(&mut rng);
    let r = tr_report(&g, &dom, VALUE_TOL)?;
    let b = check_bounds(&r, 0, dom.len());
    let failed = b
        .checks
        .iter()
        .filter(|c| c.applicable && c.hypothesis.is_none() && !c.holds)
        .map(|c| c.name.clone())
        .collect();
    Ok(SuiteSample {
        index,
        degree: r.degree,
        n_punctures: dom.len(),
        d_g: r.d_g,
        r_g: r.r_g,
        s_g: r.s_g,
        nu_g: r.nu_g,
        failed,
    })
}

/// Runs the ramification bounds on `count` seeded random maps.
pub fn bound_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let samples: Vec<SuiteSample> = (0..count)
        .into_par_iter()
        .map(|i| run_one(seed, i))
        .collect::<Result<_>>()?;
    let failures = samples.iter().filter(|s| !s.failed.is_empty()).count();
    let sharp_s = samples
        .iter()
        .filter(|s| s.s_g == super::bounds::s_bound(s.degree, 2 * s.degree - 2))
        .count();
    let max_nu_surjective = samples
        .iter()
        .filter(|s| s.d_g == 0 && s.degree <= 4)
        .map(|s| s.nu_g)
        .max()
        .unwrap_or_else(|| Ratio::from_integer(0));
    Ok(SuiteReport {
        seed,
        samples,
        failures,
        sharp_s,
        max_nu_surjective,
    })
}
