use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use gaussmap_core::algebra::json::{map_from_json, point_from_json};
use gaussmap_core::algebra::{ResidueConfig, ResidueMode, DEFAULT_CONTOUR_NODES};
use gaussmap_core::families::{build, example_params, verify_canonical, FamilyId, ParamSet};
use gaussmap_core::mesh::{generate_mesh, ChartGrid, MeshOptions};
use gaussmap_core::solver::{solve, verify_solution_with, ConstraintSystem, SolveConfig, SolveStatus};
use gaussmap_core::sphere::{
    bound_suite, check_bounds, classify_allocation, ramification_profile, tr_report, PuncturedSphere,
    VALUE_TOL,
};
use gaussmap_core::weierstrass::{
    period_report, regularity_and_completeness, total_curvature, DEFAULT_PERIOD_TOL,
};
use gaussmap_core::{Error, OneForm, WeierstrassData};

#[derive(Parser)]
#[command(
    name = "gaussmap-lab",
    version,
    about = "Gauss maps of minimal surfaces on punctured spheres"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Period tolerance (relative to the largest residue)
    #[arg(long, global = true, default_value_t = DEFAULT_PERIOD_TOL)]
    tol: f64,
    /// Contour nodes for numeric residues
    #[arg(long, global = true, default_value_t = DEFAULT_CONTOUR_NODES)]
    contour_nodes: usize,
    /// Residue method: exact (Laurent expansion) or numeric (contour)
    #[arg(long, global = true, default_value = "exact")]
    residues: String,
    /// Seed for randomized subcommands
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Totally ramified values and bounds of a rational map on a punctured sphere
    Analyze {
        /// {"num": [...], "den": [...]}, coefficients from the constant term up; @file reads a file
        #[arg(long)]
        map: String,
        /// List of points, e.g. [[0,1],[0,-1],"inf"]
        #[arg(long, default_value = "[]")]
        punctures: String,
        /// Height form h in ω = h dz, same encoding as --map; adds period and metric checks
        #[arg(long)]
        omega: Option<String>,
    },
    /// Full certificate for a named family
    Verify {
        #[arg(long)]
        family: String,
        /// Parameter object; defaults to the worked example of the family
        #[arg(long)]
        params: Option<String>,
    },
    /// Ramification bounds on seeded random maps
    Bounds {
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Solve a period constraint system from a JSON spec
    Solve {
        /// Solve spec, or @file
        #[arg(long)]
        spec: String,
    },
    /// Integrate the surface over a chart grid and write an OBJ file
    Mesh {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        params: Option<String>,
        /// {"g": map, "omega": map, "punctures": [...]} instead of a family
        #[arg(long)]
        data: Option<String>,
        /// Chart grid JSON; defaults to a polar grid 0.1 ≤ |z| ≤ 8, 40 × 96
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Build even if the period condition fails
        #[arg(long)]
        allow_period_failure: bool,
    },
    /// Family ids, parameter names and descriptions
    ListFamilies,
}

struct Outcome {
    report: Value,
    pass: bool,
}

fn read_json(arg: &str) -> Result<Value, Error> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn residue_setup(c: &Common) -> Result<(ResidueMode, ResidueConfig), Error> {
    let mode = match c.residues.as_str() {
        "exact" => ResidueMode::Exact,
        "numeric" => ResidueMode::Numeric,
        other => return Err(Error::ConfigError(format!("unknown residue method {other}"))),
    };
    let cfg = ResidueConfig {
        nodes: c.contour_nodes,
        ..ResidueConfig::default()
    };
    Ok((mode, cfg))
}

fn analyze(c: &Common, map: &str, punctures: &str, omega: Option<&str>) -> Result<Outcome, Error> {
    let g = map_from_json(&read_json(map)?)?;
    let pts = match read_json(punctures)? {
        Value::Array(a) => a.iter().map(point_from_json).collect::<Result<Vec<_>, _>>()?,
        other => return Err(Error::Parse(format!("punctures must be a list, got {other}"))),
    };
    let dom = PuncturedSphere::new(pts)?;
    let tr = tr_report(&g, &dom, VALUE_TOL)?;
    let bounds = check_bounds(&tr, 0, dom.len());
    let profile = ramification_profile(&g)?;
    let omitted: Vec<_> = tr.omitted.iter().map(|o| o.value.clone()).collect();
    let allocation = if omitted.is_empty() {
        None
    } else {
        classify_allocation(&g.to_c64(), &dom.to_c64(), &omitted).ok()
    };
    let mut report = json!({
        "degree": g.degree(),
        "profile": to_value(&profile),
        "ramification": to_value(&tr),
        "bounds": to_value(&bounds),
        "allocation": to_value(&allocation),
    });
    let mut pass = bounds.all_hold;
    if let Some(h) = omega {
        let h = map_from_json(&read_json(h)?)?;
        let data = WeierstrassData::new(g, OneForm::new(h)?, dom)?;
        let (mode, cfg) = residue_setup(c)?;
        let periods = period_report(&data, mode, c.tol, &cfg)?;
        let metric = regularity_and_completeness(&data)?;
        pass &= periods.passed && metric.regular && metric.complete;
        report["periods"] = to_value(&periods);
        report["metric"] = to_value(&metric);
        report["curvature_pi"] = json!(total_curvature(&data));
    }
    report["pass"] = json!(pass);
    Ok(Outcome { report, pass })
}

fn family_params(id: FamilyId, params: Option<&str>) -> Result<ParamSet<Complex64>, Error> {
    match params {
        Some(p) => ParamSet::from_json(&read_json(p)?),
        None => Ok(example_params(id).unwrap_or_default()),
    }
}

fn verify(c: &Common, family: &str, params: Option<&str>) -> Result<Outcome, Error> {
    let id: FamilyId = family.parse()?;
    if id.is_canonical() {
        return match verify_canonical(id) {
            Ok(r) => Ok(Outcome {
                report: json!({"family": id, "canonical": to_value(&r), "pass": true}),
                pass: true,
            }),
            Err(Error::StructuralViolation(m)) => Ok(Outcome {
                report: json!({"family": id, "violation": m, "pass": false}),
                pass: false,
            }),
            Err(e) => Err(e),
        };
    }
    let p = family_params(id, params)?;
    let (mode, cfg) = residue_setup(c)?;
    let cert = verify_solution_with(id, &p, c.tol, mode, &cfg)?;
    let pass = cert.passed;
    Ok(Outcome {
        report: to_value(&cert),
        pass,
    })
}

fn bounds(c: &Common, count: usize) -> Result<Outcome, Error> {
    let seed = c.seed.unwrap_or(0);
    let r = bound_suite(seed, count)?;
    let pass = r.failures == 0;
    Ok(Outcome {
        report: to_value(&r),
        pass,
    })
}

fn run_solve(c: &Common, spec: &str) -> Result<Outcome, Error> {
    let v = read_json(spec)?;
    let sys = ConstraintSystem::from_json(&v)?;
    let mut cfg = SolveConfig::from_json(&v)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.verify_tol = c.tol;
    let r = solve(&sys, &cfg)?;
    let pass = r.status == SolveStatus::Solved;
    Ok(Outcome {
        report: to_value(&r),
        pass,
    })
}

fn mesh(
    family: Option<&str>,
    params: Option<&str>,
    data: Option<&str>,
    grid: Option<&str>,
    out: &PathBuf,
    allow: bool,
) -> Result<Outcome, Error> {
    let grid = match grid {
        Some(g) => ChartGrid::from_json(&read_json(g)?)?,
        None => ChartGrid::polar(Complex64::new(0.0, 0.0), 0.1, 8.0, 40, 96),
    };
    let mut opts = MeshOptions {
        allow_period_failure: allow,
        ..MeshOptions::default()
    };
    let m = match (family, data) {
        (Some(f), None) => {
            let id: FamilyId = f.parse()?;
            let p = family_params(id, params)?;
            let inst = build(id, &p)?;
            let data = inst
                .data
                .ok_or_else(|| Error::Unsupported(format!("{id} carries no height form")))?;
            opts.label = Some((id.to_string(), p.to_json()));
            generate_mesh(&data, &grid, &opts)?
        }
        (None, Some(d)) => generate_mesh(&WeierstrassData::from_json(&read_json(d)?)?, &grid, &opts)?,
        _ => {
            return Err(Error::ConfigError(
                "give exactly one of --family and --data".into(),
            ))
        }
    };
    for w in &m.warnings {
        eprintln!("{w}");
    }
    std::fs::write(out, m.to_obj()).map_err(|e| Error::ConfigError(format!("{}: {e}", out.display())))?;
    let report = json!({
        "file": out.display().to_string(),
        "vertices": m.vertices.len(),
        "faces": m.faces.len(),
        "boundary_components": m.boundary_components(),
        "max_closure": m.max_closure,
        "diameter": m.diameter,
        "isothermal_defect": m.isothermal_defect,
        "provenance": to_value(&m.provenance),
        "warnings": m.warnings,
    });
    Ok(Outcome { report, pass: true })
}

fn list_families() -> Outcome {
    let v: Vec<Value> = FamilyId::ALL
        .iter()
        .map(|id| {
            json!({
                "id": id,
                "params": id.param_names(),
                "canonical": id.is_canonical(),
                "description": id.description(),
            })
        })
        .collect();
    Outcome {
        report: Value::Array(v),
        pass: true,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let c = &cli.common;
    if !(c.tol > 0.0) || c.contour_nodes < 8 {
        return Err(Error::ConfigError(
            "--tol must be positive and --contour-nodes at least 8".into(),
        ));
    }
    match &cli.cmd {
        Cmd::Analyze {
            map,
            punctures,
            omega,
        } => analyze(c, map, punctures, omega.as_deref()),
        Cmd::Verify { family, params } => verify(c, family, params.as_deref()),
        Cmd::Bounds { count } => bounds(c, *count),
        Cmd::Solve { spec } => run_solve(c, spec),
        Cmd::Mesh {
            family,
            params,
            data,
            grid,
            out,
            allow_period_failure,
        } => mesh(
            family.as_deref(),
            params.as_deref(),
            data.as_deref(),
            grid.as_deref(),
            out,
            *allow_period_failure,
        ),
        Cmd::ListFamilies => Ok(list_families()),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(v: &Value, pretty: bool) {
    use std::io::Write;
    let text = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    }
    .expect("json");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn error_object(kind: &str, message: &str) -> Value {
    json!({"error": {"kind": kind, "message": message}})
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            emit(&error_object("usage", &e.kind().to_string()), false);
            return ExitCode::from(2);
        }
    };
    if let Ok(n) = std::env::var("GAUSSMAP_LAB_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring GAUSSMAP_LAB_THREADS={n}"),
        }
    }
    match run(&cli) {
        Ok(o) => {
            emit(&o.report, true);
            if o.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("verdict: fail");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            emit(&error_object(e.kind(), &e.to_string()), false);
            let verdict = matches!(e, Error::PeriodFailure { .. } | Error::StructuralViolation(_));
            ExitCode::from(if verdict { 1 } else { 2 })
        }
    }
}
