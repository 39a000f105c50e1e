//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

use std::time::{Duration, Instant};

use gaussmap_core::algebra::{
    contour_residue, ExactComplex, Poly, RationalMap, ResidueConfig, ResidueMode, SpherePoint,
};
use gaussmap_core::families::{
    build, exact_example_params, example_params, obstruction_triple, period_constraints, residue_formulas,
    verify_canonical, FamilyId, ParamSet,
};
use gaussmap_core::mesh::{generate_mesh, ChartGrid, MeshOptions, SurfaceMesh};
use gaussmap_core::solver::{
    solve, solve_json, verify_solution, verify_solution_with, Certificate, ConstraintSystem, SolveConfig,
    SolveStatus,
};
use gaussmap_core::sphere::{bound_suite, check_bounds, tr_report, PuncturedSphere};
use gaussmap_core::weierstrass::{alpha, OneForm, WeierstrassData, DEFAULT_PERIOD_TOL};
use nalgebra::Matrix3x2;
use num_complex::Complex64 as C;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Check = Result<String, String>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn half5() -> Ratio<i64> {
    Ratio::new(5, 2)
}

/// Both period routes, plus every invariant the examples share.
fn certify(id: FamilyId, p: &ParamSet<C>, d_g: usize, r_g: usize, curv: i64) -> Result<Certificate, String> {
    let cert = verify_solution(id, p, DEFAULT_PERIOD_TOL).map_err(|e| e.to_string())?;
    let numeric = verify_solution_with(
        id,
        p,
        DEFAULT_PERIOD_TOL,
        ResidueMode::Numeric,
        &ResidueConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let o = &cert.observed;
    ensure(
        cert.passed,
        format!("{id}: certificate failed {:?}", cert.verdicts),
    )?;
    ensure(
        numeric.periods.passed,
        format!("{id}: contour periods fail, max Im {:e}", numeric.periods.max_im),
    )?;
    ensure(
        o.d_g == d_g && o.r_g == r_g && o.nu_g == half5() && o.curvature_pi == curv,
        format!("{id}: observed {o:?}"),
    )?;
    ensure(
        cert.metric.regular && cert.metric.complete,
        format!("{id}: metric"),
    )?;
    Ok(cert)
}

fn criterion_1() -> Check {
    let t0 = Instant::now();
    // (a, t) with σ² = (t+3)/(a((t-1)a+4)) < 0
    let sets = [(-1.0, 0.0), (0.5, -5.0), (-2.0, 0.0), (-1.0, 2.0), (-3.0, 0.0)];
    for (a, t) in sets {
        let s2: f64 = (t + 3.0) / (a * ((t - 1.0) * a + 4.0));
        ensure(s2 < 0.0, "bad sample")?;
        let sigma = c(0.0, (-s2).sqrt());
        let p = ParamSet::new()
            .with("a", c(a, 0.0))
            .with("t", c(t, 0.0))
            .with("sigma", sigma);
        let cert = certify(FamilyId::Ms, &p, 2, 1, -8)?;
        let r = &cert.ramification;
        for v in [sigma, sigma * a] {
            ensure(
                r.is_omitted(&SpherePoint::Finite(v), 1e-7),
                format!("MS a={a} t={t}: {v} not omitted"),
            )?;
        }
        ensure(
            r.orders() == vec![2],
            format!("MS a={a} t={t}: orders {:?}", r.orders()),
        )?;
    }
    let dt = t0.elapsed();
    ensure(dt < Duration::from_secs(1), format!("runtime {dt:?}"))?;
    Ok(format!("5 sets, {dt:.2?}"))
}

fn criterion_2() -> Check {
    // (a, b) real with σ² = (5a+11b-16)/(16ab-11a-5b) < 0
    let sets = [(0.0, 2.0), (0.0, 3.0), (0.0, -1.0), (-1.0, 2.0), (-2.0, 0.0)];
    for (a, b) in sets {
        let s2: f64 = (5.0 * a + 11.0 * b - 16.0) / (16.0 * a * b - 11.0 * a - 5.0 * b);
        ensure(s2 < 0.0, "bad sample")?;
        let p = ParamSet::new()
            .with("a", c(a, 0.0))
            .with("b", c(b, 0.0))
            .with("sigma", c(0.0, (-s2).sqrt()));
        let cert = certify(FamilyId::Kw, &p, 2, 1, -16)?;
        ensure(
            cert.ramification.orders() == vec![2],
            format!("KW a={a} b={b}: orders"),
        )?;
    }
    Ok("5 sets".into())
}

fn criterion_3() -> Check {
    let ids = [
        FamilyId::T47C1W1,
        FamilyId::T47C1W2,
        FamilyId::T47C1W5,
        FamilyId::T47C1W8,
        FamilyId::T47C4W5,
    ];
    let mut worst: f64 = 0.0;
    for id in ids {
        let p = example_params(id).unwrap();
        let cert = certify(id, &p, 2, 1, -16)?;
        ensure(
            cert.ramification.degree == 4,
            format!("{id}: degree {}", cert.ramification.degree),
        )?;
        ensure(
            cert.periods.max_im <= 1e-10,
            format!("{id}: max Im {:e}", cert.periods.max_im),
        )?;
        worst = worst.max(cert.periods.max_im);
        if let Some(q) = exact_example_params(id) {
            let ex = verify_solution(id, &q, DEFAULT_PERIOD_TOL).map_err(|e| e.to_string())?;
            ensure(
                ex.passed && ex.periods.max_im == 0.0,
                format!("{id}: exact instance"),
            )?;
        }
    }
    Ok(format!("max |Im Res| = {worst:.1e}"))
}

fn criterion_4() -> Check {
    let id = FamilyId::P49W5;
    let p = example_params(id).unwrap();
    let v = period_constraints(id, &p).map_err(|e| e.to_string())?;
    ensure(v.len() == 6, "six constraints")?;
    let worst = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    ensure(worst < 1e-9, format!("constraint {worst:e}"))?;
    let inst = build(id, &p).map_err(|e| e.to_string())?;
    let r = tr_report(&inst.g, &inst.dom, 1e-9).map_err(|e| e.to_string())?;
    ensure(r.d_g == 1 && r.r_g == 2 && r.nu_g == half5(), format!("{r:?}"))?;
    for b in ["b1", "b2"] {
        let val = SpherePoint::Finite(*p.get(b).unwrap());
        ensure(r.order_of(&val, 1e-6) == Some(4), format!("order at {b}"))?;
    }
    Ok(format!("max constraint {worst:.1e}"))
}

fn random_params(id: FamilyId, rng: &mut ChaCha8Rng) -> ParamSet<C> {
    let mut z = || c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    if id == FamilyId::P49W5 {
        ParamSet::new()
            .with("sigma", z())
            .with("b1", z())
            .with("b2", z())
            .with("theta", z())
    } else {
        ParamSet::new()
            .with("sigma", z())
            .with("tau", z())
            .with("b", z())
            .with("theta", z())
    }
}

fn criterion_5() -> Check {
    let ids = [
        FamilyId::T47C1W1,
        FamilyId::T47C1W2,
        FamilyId::T47C1W5,
        FamilyId::T47C1W8,
        FamilyId::T47C4W5,
        FamilyId::P49W5,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = ResidueConfig::default();
    let mut worst: f64 = 0.0;
    for id in ids {
        let mut done = 0;
        while done < 20 {
            let p = random_params(id, &mut rng);
            // Near-coincident parameters are valid but badly conditioned; redraw them.
            let vals: Vec<C> = p.iter().filter(|(n, _)| *n != "theta").map(|(_, v)| *v).collect();
            let spread = vals
                .iter()
                .enumerate()
                .flat_map(|(i, a)| vals[i + 1..].iter().map(move |b| (a - b).norm()));
            if spread.fold(f64::INFINITY, f64::min) < 0.1 {
                continue;
            }
            let Ok(inst) = build(id, &p) else { continue };
            let a = alpha(inst.data.as_ref().unwrap()).map_err(|e| e.to_string())?;
            let formulas = residue_formulas(id, &p).map_err(|e| e.to_string())?;
            let mut pairs = Vec::new();
            for t in &formulas {
                let oracle: Vec<C> = a
                    .components()
                    .into_iter()
                    .map(|comp| contour_residue(comp, &t.point, &cfg))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                pairs.push((t, oracle));
            }
            // Relative to the largest residue of the instance: some ends have zero residues.
            let scale = pairs
                .iter()
                .flat_map(|(_, o)| o.iter())
                .fold(0.0f64, |m, z| m.max(z.norm()));
            for (t, oracle) in &pairs {
                for k in 0..3 {
                    let rel = (t.residues[k] - oracle[k]).norm() / scale.max(1e-300);
                    worst = worst.max(rel);
                    ensure(
                        rel < 1e-8,
                        format!("{id} at {}: component {} off by {rel:e}", t.point, k + 1),
                    )?;
                }
            }
            done += 1;
        }
    }
    Ok(format!("120 sets, worst relative gap {worst:.1e}"))
}

fn criterion_6() -> Check {
    let t0 = Instant::now();
    let rep = bound_suite(6, 200).map_err(|e| e.to_string())?;
    ensure(rep.samples.len() == 200, "sample count")?;
    ensure(rep.failures == 0, format!("{} violations", rep.failures))?;
    ensure(
        rep.max_nu_surjective <= Ratio::from_integer(2),
        format!("surjective ν {}", rep.max_nu_surjective),
    )?;
    let degs: Vec<usize> = rep.samples.iter().map(|s| s.degree).collect();
    ensure(degs.iter().all(|d| (2..=6).contains(d)), "degree range")?;
    ensure(rep.samples.iter().all(|s| s.n_punctures <= 4), "puncture range")?;

    let z4 = RationalMap::from_poly(Poly::monomial(ExactComplex::one(), 4));
    let r = tr_report(&z4, &PuncturedSphere::sphere(), 1e-9).map_err(|e| e.to_string())?;
    let b = check_bounds(&r, 0, 0);
    let s = b.get("S<=floor(dB/(d-1))").ok_or("missing S bound")?;
    ensure(
        r.s_g == 8 && s.holds && s.slack == Ratio::from_integer(0),
        format!("z^4: S = {}, slack {}", r.s_g, s.slack),
    )?;
    ensure(b.all_hold, "z^4 bounds")?;
    let dt = t0.elapsed();
    ensure(dt < Duration::from_secs(10), format!("runtime {dt:?}"))?;
    Ok(format!("200 maps, 0 violations, {} sharp, {dt:.2?}", rep.sharp_s))
}

fn criterion_7() -> Check {
    let cases = [
        (FamilyId::CanonG111, Some("-1")),
        (FamilyId::CanonG211, Some("9")),
        (FamilyId::CanonG42, Some("-1")),
        (FamilyId::CanonGd1, None),
    ];
    for (id, cr) in cases {
        let rep = verify_canonical(id).map_err(|e| e.to_string())?;
        let bad: Vec<&str> = rep
            .clauses
            .iter()
            .filter(|k| !k.holds)
            .map(|k| k.name.as_str())
            .collect();
        ensure(bad.is_empty(), format!("{id}: {bad:?}"))?;
        if let Some(cr) = cr {
            ensure(
                rep.cross_ratio == cr,
                format!("{id}: cross ratio {}", rep.cross_ratio),
            )?;
        }
    }
    Ok("4 maps".into())
}

/// Smallest singular value of the real system `Re(c₀U) = Im(c₁U) = Re(c₂U) = 0`.
fn oracle_min_singular(tau: C) -> f64 {
    let cs = [tau * tau - 1.0, tau * tau + 1.0, tau];
    let m = Matrix3x2::new(cs[0].re, -cs[0].im, cs[1].im, cs[1].re, cs[2].re, -cs[2].im);
    m.singular_values().min()
}

fn criterion_8() -> Check {
    let mut taus = vec![c(0.0, 1.0), c(0.0, -1.0)];
    for k in 0..38 {
        taus.push(C::from_polar(1.0, 0.1 + std::f64::consts::TAU * k as f64 / 38.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    while taus.len() < 100 {
        taus.push(c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)));
    }
    let u = c(0.7, -0.4);
    for &tau in &taus {
        let ob = obstruction_triple(u, tau);
        ensure(ob.infeasible, format!("τ = {tau}: not certified"))?;
        ensure(
            !ob.conditions.iter().all(|&x| x),
            format!("τ = {tau}: U = {u} passes"),
        )?;
        let s = oracle_min_singular(tau);
        ensure(
            s > 1e-6 && (s - ob.min_singular).abs() < 1e-9 * (1.0 + s),
            format!("τ = {tau}: σ_min {s} vs {}", ob.min_singular),
        )?;
    }
    let r = solve_json(&json!({"family": "case2-w1", "free": ["tau", "u"], "starts": 100, "seed": 0}))
        .map_err(|e| e.to_string())?;
    ensure(
        r.status != SolveStatus::Solved,
        format!("case 2 solved: {:?}", r.params),
    )?;
    Ok(format!(
        "100 τ values; solver {:?}, best residual {:.2}",
        r.status, r.residual_norm
    ))
}

fn catenoid() -> WeierstrassData<ExactComplex> {
    let e = |v: &[i64]| Poly::new(v.iter().map(|&k| ExactComplex::from_ints(k, 0)).collect());
    WeierstrassData::new(
        RationalMap::identity(),
        OneForm::new(RationalMap::new(e(&[1]), e(&[0, 0, 1])).unwrap()).unwrap(),
        PuncturedSphere::new(vec![
            SpherePoint::Finite(ExactComplex::zero()),
            SpherePoint::Infinity,
        ])
        .unwrap(),
    )
    .unwrap()
}

/// Counts `v`, `vn` and `f` records.
fn reparse(obj: &str) -> (usize, usize, usize) {
    let mut n = (0, 0, 0);
    for l in obj.lines() {
        let mut it = l.split_whitespace();
        match it.next() {
            Some("v") => {
                assert_eq!(it.filter(|x| x.parse::<f64>().is_ok()).count(), 3);
                n.0 += 1;
            }
            Some("vn") => n.1 += 1,
            Some("f") => {
                assert_eq!(it.count(), 4);
                n.2 += 1;
            }
            _ => {}
        }
    }
    n
}

/// Node and cell counts of a polar grid around 0 once every node, radial
/// segment and arc within `excl` of an end is removed.
fn expected_polar_counts(r0: f64, r1: f64, nr: usize, nt: usize, ends: &[C], excl: f64) -> (usize, usize) {
    let tau = std::f64::consts::TAU;
    let rad = |i: usize| r0 * (r1 / r0).powf(i as f64 / (nr - 1) as f64);
    let node = |i: usize, j: usize| C::from_polar(rad(i), tau * j as f64 / nt as f64);
    let seg_dist = |a: C, b: C, p: C| {
        let d = b - a;
        let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
        (a + d * t - p).norm()
    };
    let arc_dist = |r: f64, j: usize, p: C| {
        let (a0, a1) = (tau * j as f64 / nt as f64, tau * (j + 1) as f64 / nt as f64);
        let ang = p.arg().rem_euclid(tau);
        if ang >= a0 && ang <= a1 {
            (p.norm() - r).abs()
        } else {
            (C::from_polar(r, a0) - p)
                .norm()
                .min((C::from_polar(r, a1) - p).norm())
        }
    };
    let clear = |d: &dyn Fn(C) -> f64| ends.iter().all(|&e| d(e) >= excl);
    let nodes = (0..nr)
        .flat_map(|i| (0..nt).map(move |j| (i, j)))
        .filter(|&(i, j)| clear(&|e| (node(i, j) - e).norm()))
        .count();
    let mut cells = 0;
    for i in 0..nr - 1 {
        for j in 0..nt {
            let corners = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
            let ok = corners.iter().all(|&z| clear(&|e| (z - e).norm()))
                && clear(&|e| seg_dist(node(i, j), node(i + 1, j), e))
                && clear(&|e| seg_dist(node(i, (j + 1) % nt), node(i + 1, (j + 1) % nt), e))
                && clear(&|e| arc_dist(rad(i), j, e))
                && clear(&|e| arc_dist(rad(i + 1), j, e));
            cells += ok as usize;
        }
    }
    (nodes, cells)
}

fn mesh_check(name: &str, m: &SurfaceMesh, expect: (usize, usize), dt: Duration) -> Result<String, String> {
    ensure(
        m.max_closure < 1e-6 * m.diameter,
        format!("{name}: closure {:e} vs diameter {:e}", m.max_closure, m.diameter),
    )?;
    ensure(
        m.isothermal_defect < 1e-4,
        format!("{name}: isothermal {:e}", m.isothermal_defect),
    )?;
    let (v, vn, f) = reparse(&m.to_obj());
    ensure(
        (v, vn, f) == (expect.0, expect.0, expect.1),
        format!("{name}: obj counts {v}/{vn}/{f}, grid {expect:?}"),
    )?;
    ensure(dt < Duration::from_secs(5), format!("{name}: runtime {dt:?}"))?;
    Ok(format!(
        "{name} {v}v/{f}f closure {:.0e} iso {:.0e} {dt:.2?}",
        m.max_closure, m.isothermal_defect
    ))
}

fn criterion_9() -> Check {
    let t0 = Instant::now();
    let grid = ChartGrid::polar(c(0.0, 0.0), 0.2, 5.0, 24, 48);
    let m = generate_mesh(&catenoid(), &grid, &MeshOptions::default()).map_err(|e| e.to_string())?;
    let a = mesh_check("catenoid", &m, (24 * 48, 23 * 48), t0.elapsed())?;

    let t0 = Instant::now();
    let id = FamilyId::T47C1W1;
    let p = example_params(id).unwrap();
    let data = build(id, &p).map_err(|e| e.to_string())?.data.unwrap();
    let grid = ChartGrid::polar(c(0.0, 0.0), 0.1, 8.0, 40, 96);
    let opts = MeshOptions {
        label: Some((id.to_string(), p.to_json())),
        ..MeshOptions::default()
    };
    let m = generate_mesh(&data, &grid, &opts).map_err(|e| e.to_string())?;
    let expect = expected_polar_counts(0.1, 8.0, 40, 96, &[c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)], 0.05);
    let b = mesh_check("t47-c1-w1", &m, expect, t0.elapsed())?;
    Ok(format!("{a}; {b}"))
}

fn criterion_10() -> Check {
    let p = example_params(FamilyId::P49W5).unwrap();
    // σ is pinned: with only θ fixed the constraint Jacobian has rank 4 of 6.
    let sys = ConstraintSystem::from_json(&json!({
        "family": "p49-w5", "fix": {"theta": [1, 0], "sigma": [0, 1]}, "free": ["b1", "b2"]
    }))
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let mut start = ParamSet::new();
    for n in ["b1", "b2"] {
        let z = *p.get(n).unwrap();
        start.insert(
            n,
            z * (1.0 + C::from_polar(0.05, rng.random_range(0.0..std::f64::consts::TAU))),
        );
    }
    let cfg = SolveConfig {
        starts: 8,
        seed: 10,
        initial: Some(start),
        residual_tol: 1e-13,
        ..SolveConfig::default()
    };
    let r1 = solve(&sys, &cfg).map_err(|e| e.to_string())?;
    let r2 = solve(&sys, &cfg).map_err(|e| e.to_string())?;
    ensure(
        r1.status == SolveStatus::Solved,
        format!("{:?}: {}", r1.status, r1.note),
    )?;
    ensure(r1.x == r2.x && r1.best_start == r2.best_start, "runs differ")?;
    let mut worst: f64 = 0.0;
    for n in ["b1", "b2"] {
        worst = worst.max((r1.params.get(n).unwrap() - p.get(n).unwrap()).norm());
    }
    ensure(worst < 1e-8, format!("parameter error {worst:e}"))?;
    Ok(format!("parameter error {worst:.1e}, start {}", r1.best_start))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("MS examples", criterion_1),
        ("KW examples", criterion_2),
        ("four-ended instances", criterion_3),
        ("D=1 R=2 instance", criterion_4),
        ("residue formulas vs contour", criterion_5),
        ("bound suite", criterion_6),
        ("canonical maps", criterion_7),
        ("case 2 infeasibility", criterion_8),
        ("meshes", criterion_9),
        ("solver recovery", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
