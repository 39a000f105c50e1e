use num_rational::Ratio;
use serde::Serialize;

use super::report::{ser_ratio, TotallyRamifiedReport};

type Q = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: Q,
    #[serde(serialize_with = "ser_ratio")]
    pub rhs: Q,
    pub holds: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub slack: Q,
    /// Attained with equality.
    pub sharp: bool,
    /// Extra hypothesis this bound needs beyond being a rational map on the sphere.
    pub hypothesis: Option<String>,
    /// False when a stated side condition (degree, `D_g`) is not met.
    pub applicable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub degree: usize,
    pub genus: usize,
    pub n_punctures: usize,
    pub checks: Vec<BoundCheck>,
    /// Every applicable bound without an extra hypothesis holds.
    pub all_hold: bool,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn entry(name: &str, lhs: Q, rhs: Q, hypothesis: Option<&str>, applicable: bool) -> BoundCheck {
    let slack = rhs - lhs;
    BoundCheck {
        name: name.to_string(),
        lhs,
        rhs,
        holds: lhs <= rhs,
        slack,
        sharp: slack == Q::from_integer(0),
        hypothesis: hypothesis.map(str::to_string),
        applicable,
    }
}

fn int(n: usize) -> Q {
    Q::from_integer(n as i64)
}

/// `⌊d B / (d - 1)⌋`, zero for Möbius maps.
pub fn s_bound(d: usize, b: usize) -> usize {
    if d < 2 {
        0
    } else {
        d * b / (d - 1)
    }
}

/// `d - ⌊d/ν⌋`: least branching a fiber of a ν-fold ramified value carries.
pub fn fiber_branching_floor(d: usize, nu: usize) -> usize {
    d - d / nu
}

/// Evaluates the ramification inequalities on a report.
///
/// Only genus 0 is meaningful for rational maps; `genus` enters the
/// conditional estimate for Gauss maps of complete surfaces.
pub fn check_bounds(r: &TotallyRamifiedReport, genus: usize, n_punctures: usize) -> BoundReport {
    let d = r.degree;
    let b = r.total_branching;
    let sb = s_bound(d, b);
    let nu = r.nu_g;
    let mut checks = vec![
        entry("2R<=S", int(2 * r.r_g), int(r.s_g), None, true),
        entry("S<=floor(dB/(d-1))", int(r.s_g), int(sb), None, d >= 2),
        entry("S<=2d", int(r.s_g), int(2 * d), None, true),
        entry(
            "nu<=D+floor(dB/(d-1))/4",
            nu,
            int(r.d_g) + Q::new(sb as i64, 4),
            None,
            true,
        ),
        entry(
            "R<=floor(B/ceil(d/2))",
            int(r.r_g),
            int(b / d.div_ceil(2).max(1)),
            None,
            true,
        ),
        entry("nu<=2 (D=0, d<=4)", nu, int(2), None, r.d_g == 0 && d <= 4),
        entry("nu<=2 (d=2, D<=1)", nu, int(2), None, d == 2 && r.d_g <= 1),
    ];
    // Per-value fiber inequalities.
    for v in &r.ramified {
        let c = fiber_branching_floor(d, v.order);
        checks.push(entry(
            &format!("fiber branching at {} >= d-floor(d/nu)", v.value),
            int(c),
            int(v.fiber_branching),
            None,
            true,
        ));
        if d >= 2 {
            checks.push(entry(
                &format!("nu at {} <= d c/(d-1)", v.value),
                int(v.order),
                Q::new((d * c) as i64, (d - 1) as i64),
                None,
                true,
            ));
        }
    }
    let hyp = Some("g is the Gauss map of a complete minimal surface of finite total curvature");
    let n = n_punctures as i64;
    let upper = Q::from_integer(2) + Q::new(2 * genus as i64 - 2 + n, d.max(1) as i64);
    checks.push(entry("D<=nu", int(r.d_g), nu, hyp, true));
    checks.push(entry("nu<=2+(2genus-2+n)/d", nu, upper, hyp, d >= 1));
    let all_hold = checks
        .iter()
        .filter(|c| c.applicable && c.hypothesis.is_none())
        .all(|c| c.holds);
    BoundReport {
        degree: d,
        genus,
        n_punctures,
        checks,
        all_hold,
    }
}
