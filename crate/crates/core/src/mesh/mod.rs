//! Surfaces `f = Re ∫ α` sampled on a chart grid, with mesh export.

mod quad;

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{ResidueConfig, ResidueMode, Scalar, SpherePoint};
use crate::error::{Error, Result};
use crate::weierstrass::{alpha, normal_of, period_report, pointwise_geometry, WeierstrassData};

pub use quad::{gauss_legendre, integrate_path, Integrand, Path, QuadConfig};

type C = Complex64;

/// Period tolerance required before a mesh is built.
pub const MESH_PERIOD_TOL: f64 = 1e-8;
/// Cycle closure tolerance, relative to the mesh diameter.
pub const CLOSURE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridKind {
    /// Geometrically spaced circles around `center`, `n_theta` rays.
    Polar {
        center: C,
        r_min: f64,
        r_max: f64,
        n_r: usize,
        n_theta: usize,
    },
    Rect {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
    },
}

/// `{"kind": "polar", "center": [0, 0], "r_min": .., "r_max": .., "n_r": .., "n_theta": ..}`
/// or `{"kind": "rect", "x_min": .., ..., "nx": .., "ny": ..}`, plus optional
/// `exclusion` and `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartGrid {
    #[serde(flatten)]
    pub kind: GridKind,
    /// Nodes and edges keep at least this distance from punctures and poles of `α`.
    #[serde(default = "default_exclusion")]
    pub exclusion: f64,
    /// Integration starts at the present node nearest this point.
    #[serde(default)]
    pub base: Option<C>,
}

fn default_exclusion() -> f64 {
    0.05
}

impl ChartGrid {
    pub fn polar(center: C, r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Self {
        ChartGrid {
            kind: GridKind::Polar {
                center,
                r_min,
                r_max,
                n_r,
                n_theta,
            },
            exclusion: 0.05,
            base: None,
        }
    }

    pub fn rect(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Self {
        ChartGrid {
            kind: GridKind::Rect {
                x_min: x.0,
                x_max: x.1,
                y_min: y.0,
                y_max: y.1,
                nx,
                ny,
            },
            exclusion: 0.05,
            base: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            GridKind::Polar {
                r_min,
                r_max,
                n_r,
                n_theta,
                ..
            } => r_min > 0.0 && r_max > r_min && n_r >= 2 && n_theta >= 3,
            GridKind::Rect {
                x_min,
                x_max,
                y_min,
                y_max,
                nx,
                ny,
            } => x_max > x_min && y_max > y_min && nx >= 2 && ny >= 2,
        };
        if !ok || !(self.exclusion > 0.0) {
            return Err(Error::ConfigError(format!("bad chart grid {:?}", self.kind)));
        }
        Ok(())
    }

    fn shape(&self) -> (usize, usize, bool) {
        match self.kind {
            GridKind::Polar { n_r, n_theta, .. } => (n_r, n_theta, true),
            GridKind::Rect { nx, ny, .. } => (nx, ny, false),
        }
    }

    fn radius(&self, i: usize) -> f64 {
        match self.kind {
            GridKind::Polar {
                r_min, r_max, n_r, ..
            } => r_min * (r_max / r_min).powf(i as f64 / (n_r - 1) as f64),
            GridKind::Rect { .. } => unreachable!(),
        }
    }

    fn angle(&self, j: usize) -> f64 {
        match self.kind {
            GridKind::Polar { n_theta, .. } => 2.0 * PI * j as f64 / n_theta as f64,
            GridKind::Rect { .. } => unreachable!(),
        }
    }

    fn node(&self, i: usize, j: usize) -> C {
        match self.kind {
            GridKind::Polar { center, .. } => center + C::from_polar(self.radius(i), self.angle(j)),
            GridKind::Rect {
                x_min,
                x_max,
                y_min,
                y_max,
                nx,
                ny,
            } => C::new(
                x_min + (x_max - x_min) * i as f64 / (nx - 1) as f64,
                y_min + (y_max - y_min) * j as f64 / (ny - 1) as f64,
            ),
        }
    }

    /// Path of the edge from `(i, j)` along axis 0 (radial / x) or 1 (angular / y).
    fn edge_path(&self, i: usize, j: usize, axis: usize) -> Path {
        let (_, nj, periodic) = self.shape();
        match (self.kind, axis) {
            (GridKind::Polar { center, .. }, 1) => {
                let a = self.angle(j);
                let b = if periodic && j + 1 == nj {
                    2.0 * PI
                } else {
                    self.angle(j + 1)
                };
                Path::Arc {
                    center,
                    radius: self.radius(i),
                    start: a,
                    end: b,
                }
            }
            (_, 0) => Path::Segment {
                from: self.node(i, j),
                to: self.node(i + 1, j),
            },
            _ => Path::Segment {
                from: self.node(i, j),
                to: self.node(i, j + 1),
            },
        }
    }

    /// Whether `p` lies in the cell spanned by `(i, j)` and `(i + 1, j + 1)`.
    fn cell_contains(&self, i: usize, j: usize, p: C) -> bool {
        match self.kind {
            GridKind::Polar { center, n_theta, .. } => {
                let v = p - center;
                let r = v.norm();
                let a = v.arg().rem_euclid(2.0 * PI);
                let (a0, a1) = (self.angle(j), self.angle(j) + 2.0 * PI / n_theta as f64);
                (self.radius(i)..=self.radius(i + 1)).contains(&r) && (a0..=a1).contains(&a)
            }
            GridKind::Rect { .. } => {
                let (lo, hi) = (self.node(i, j), self.node(i + 1, j + 1));
                (lo.re..=hi.re).contains(&p.re) && (lo.im..=hi.im).contains(&p.im)
            }
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("chart grid: {e}")))
    }

    /// Stable digest of the grid definition.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("grid serializes");
        short_hash(text.as_bytes())
    }
}

fn short_hash(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub family: Option<String>,
    pub params_hash: String,
    pub grid_hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    /// Quads, 0-based, counterclockwise in the chart.
    pub faces: Vec<[usize; 4]>,
    /// Chart coordinate of each vertex.
    pub chart: Vec<C>,
    pub provenance: Provenance,
    /// Largest `|Re ∮ α|` over the fundamental cycles of the grid graph.
    pub max_closure: f64,
    pub diameter: f64,
    /// Largest `max(| |f_x|² - |f_y|² |, |⟨f_x, f_y⟩|) / ((|f_x|² + |f_y|²) / 2)` at interior nodes.
    pub isothermal_defect: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct MeshOptions {
    pub quad: QuadConfig,
    /// Build even when the period check fails (the surface is then multivalued).
    pub allow_period_failure: bool,
    /// Family id and parameter JSON written into the header.
    pub label: Option<(String, serde_json::Value)>,
}

struct Graph {
    /// Grid index of each present node.
    nodes: Vec<(usize, usize)>,
    index: Vec<Option<usize>>,
    /// `(a, b, path)` with the path running from `a` to `b`.
    edges: Vec<(usize, usize, Path)>,
}

fn singular_points<S: Scalar>(data: &WeierstrassData<S>, integrand: &Integrand) -> Vec<C> {
    let mut pts: Vec<C> = data
        .dom
        .punctures()
        .iter()
        .filter_map(|p| match p.to_c64() {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        })
        .collect();
    pts.extend(integrand.poles.iter().copied());
    pts
}

fn build_graph(grid: &ChartGrid, sing: &[C]) -> Graph {
    let (ni, nj, periodic) = grid.shape();
    let clear = |z: C| sing.iter().all(|s| (z - s).norm() >= grid.exclusion);
    let mut nodes = Vec::new();
    let mut index = vec![None; ni * nj];
    for i in 0..ni {
        for j in 0..nj {
            if clear(grid.node(i, j)) {
                index[i * nj + j] = Some(nodes.len());
                nodes.push((i, j));
            }
        }
    }
    let mut edges = Vec::new();
    for &(i, j) in &nodes {
        let a = index[i * nj + j].unwrap();
        let mut push = |ti: usize, tj: usize, axis: usize| {
            if let Some(b) = index[ti * nj + tj] {
                let path = grid.edge_path(i, j, axis);
                if sing.iter().all(|s| path.distance_to(*s) >= grid.exclusion) {
                    edges.push((a, b, path));
                }
            }
        };
        if i + 1 < ni {
            push(i + 1, j, 0);
        }
        if j + 1 < nj {
            push(i, j + 1, 1);
        } else if periodic {
            push(i, 0, 1);
        }
    }
    Graph { nodes, index, edges }
}

fn re3(v: &[C; 3]) -> [f64; 3] {
    [v[0].re, v[1].re, v[2].re]
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

/// Integrates `α` over a spanning tree of the grid and samples normals.
pub fn generate_mesh<S: Scalar>(
    data: &WeierstrassData<S>,
    grid: &ChartGrid,
    opts: &MeshOptions,
) -> Result<SurfaceMesh> {
    grid.validate()?;
    let mut warnings = Vec::new();
    let periods = period_report(
        data,
        ResidueMode::Exact,
        MESH_PERIOD_TOL,
        &ResidueConfig::default(),
    )?;
    if !periods.passed {
        if !opts.allow_period_failure {
            return Err(Error::PeriodFailure {
                max_im: periods.max_im,
            });
        }
        warnings.push(format!(
            "WARNING: period condition fails (max |Im Res| = {:e}); the surface is multivalued and the mesh depends on the spanning tree",
            periods.max_im
        ));
    }
    let integrand = Integrand::new(alpha(data)?.to_c64(), opts.quad)?;
    let sing = singular_points(data, &integrand);
    let graph = build_graph(grid, &sing);
    if graph.nodes.is_empty() {
        return Err(Error::ConfigError(
            "every grid node lies in an exclusion disk".into(),
        ));
    }
    let root = match grid.base {
        Some(b) => {
            if let Some(s) = sing.iter().find(|s| (b - *s).norm() < grid.exclusion) {
                return Err(Error::ConfigError(format!(
                    "base point {b} lies in the exclusion disk of {s}"
                )));
            }
            (0..graph.nodes.len())
                .min_by(|&x, &y| {
                    let (p, q) = (graph.nodes[x], graph.nodes[y]);
                    (grid.node(p.0, p.1) - b)
                        .norm()
                        .total_cmp(&(grid.node(q.0, q.1) - b).norm())
                })
                .unwrap()
        }
        None => 0,
    };

    let integrals: Vec<[C; 3]> = graph
        .edges
        .par_iter()
        .map(|(_, _, path)| integrand.integrate(path))
        .collect::<Result<_>>()?;

    // Breadth-first spanning tree; edges are listed radial (x) before angular (y).
    let n = graph.nodes.len();
    let mut adj: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for (k, &(a, b, _)) in graph.edges.iter().enumerate() {
        adj[a].push((b, k, 1.0));
        adj[b].push((a, k, -1.0));
    }
    let zero = C::new(0.0, 0.0);
    let mut value: Vec<Option<[C; 3]>> = vec![None; n];
    let mut tree = vec![false; graph.edges.len()];
    value[root] = Some([zero; 3]);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let fu = value[u].unwrap();
        for &(v, k, s) in &adj[u] {
            if value[v].is_none() {
                let d = integrals[k];
                value[v] = Some([fu[0] + d[0] * s, fu[1] + d[1] * s, fu[2] + d[2] * s]);
                tree[k] = true;
                queue.push_back(v);
            }
        }
    }

    // Keep the component of the base node.
    let mut remap = vec![None; n];
    let mut vertices = Vec::new();
    let mut chart = Vec::new();
    let mut normals = Vec::new();
    for u in 0..n {
        if let Some(f) = value[u] {
            remap[u] = Some(vertices.len());
            let (i, j) = graph.nodes[u];
            let z = grid.node(i, j);
            vertices.push(re3(&f));
            chart.push(z);
            let nrm = match pointwise_geometry(data, z) {
                Ok(g) => g.normal,
                Err(_) => normal_of(&data.g.to_c64().eval_c64(&SpherePoint::Finite(z))),
            };
            normals.push(nrm);
        }
    }
    if n - vertices.len() > 0 {
        warnings.push(format!(
            "{} grid nodes are not connected to the base node",
            n - vertices.len()
        ));
    }
    let (lo, hi) = vertices.iter().fold(
        ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]),
        |(mut lo, mut hi), v| {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
            (lo, hi)
        },
    );
    let diameter = dist3(&lo, &hi);

    let mut max_closure: f64 = 0.0;
    for (k, &(a, b, _)) in graph.edges.iter().enumerate() {
        if tree[k] {
            continue;
        }
        if let (Some(fa), Some(fb)) = (value[a], value[b]) {
            let d = integrals[k];
            let gap = (0..3)
                .map(|c| (fa[c] + d[c] - fb[c]).re.powi(2))
                .sum::<f64>()
                .sqrt();
            max_closure = max_closure.max(gap);
        }
    }
    if max_closure > CLOSURE_TOL * diameter.max(1e-300) {
        let msg = format!("cycle closure {max_closure:e} exceeds {CLOSURE_TOL:e} x diameter {diameter:e}");
        if periods.passed {
            return Err(Error::ConvergenceFailure(msg));
        }
        warnings.push(format!("WARNING: {msg}"));
    }

    let (ni, nj, periodic) = grid.shape();
    let cols = if periodic { nj } else { nj - 1 };
    let id = |i: usize, j: usize| graph.index[i * nj + (j % nj)].and_then(|u| remap[u]);
    let edge_set: std::collections::HashSet<(usize, usize)> = graph
        .edges
        .iter()
        .filter_map(|&(x, y, _)| Some((remap[x]?, remap[y]?)))
        .flat_map(|(a, b)| [(a, b), (b, a)])
        .collect();
    let has_edge = |a: usize, b: usize| edge_set.contains(&(a, b));
    let mut faces = Vec::new();
    for i in 0..ni - 1 {
        for j in 0..cols {
            let q = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            let Some(q) = q.iter().copied().collect::<Option<Vec<usize>>>() else {
                continue;
            };
            if sing.iter().any(|s| grid.cell_contains(i, j, *s)) {
                continue;
            }
            if (0..4).all(|k| has_edge(q[k], q[(k + 1) % 4])) {
                faces.push([q[0], q[1], q[2], q[3]]);
            }
        }
    }

    let isothermal_defect = isothermal_defect(&integrand, grid, &graph, &remap, &chart)?;
    let provenance = Provenance {
        family: opts.label.as_ref().map(|l| l.0.clone()),
        params_hash: match &opts.label {
            Some((_, p)) => short_hash(p.to_string().as_bytes()),
            None => short_hash(format!("{:?}", data.to_c64()).as_bytes()),
        },
        grid_hash: grid.hash(),
    };
    Ok(SurfaceMesh {
        vertices,
        normals,
        faces,
        chart,
        provenance,
        max_closure,
        diameter,
        isothermal_defect,
        warnings,
    })
}

/// Central differences of `f` in the chart at nodes whose four grid neighbours exist.
fn isothermal_defect(
    integrand: &Integrand,
    grid: &ChartGrid,
    graph: &Graph,
    remap: &[Option<usize>],
    chart: &[C],
) -> Result<f64> {
    let (ni, nj, periodic) = grid.shape();
    let present = |i: usize, j: usize| graph.index[i * nj + j].and_then(|u| remap[u]).is_some();
    let mut interior = Vec::new();
    for &(i, j) in &graph.nodes {
        let jm = if j == 0 {
            periodic.then(|| nj - 1)
        } else {
            Some(j - 1)
        };
        let jp = if j + 1 == nj {
            periodic.then_some(0)
        } else {
            Some(j + 1)
        };
        if i == 0 || i + 1 == ni || !present(i, j) {
            continue;
        }
        if let (Some(a), Some(b)) = (jm, jp) {
            if present(i - 1, j) && present(i + 1, j) && present(i, a) && present(i, b) {
                interior.push(grid.node(i, j));
            }
        }
    }
    let step = chart
        .iter()
        .zip(chart.iter().skip(1))
        .map(|(a, b)| (a - b).norm())
        .fold(f64::INFINITY, f64::min);
    let h = 1e-3 * step.min(grid.exclusion);
    let defects: Vec<f64> = interior
        .par_iter()
        .map(|&z| {
            let fx = integrand.integrate(&Path::Segment {
                from: z - h,
                to: z + h,
            })?;
            let ih = C::new(0.0, h);
            let fy = integrand.integrate(&Path::Segment {
                from: z - ih,
                to: z + ih,
            })?;
            let (x, y) = (re3(&fx), re3(&fy));
            let e: f64 = x.iter().map(|t| t * t).sum();
            let g: f64 = y.iter().map(|t| t * t).sum();
            let f: f64 = (0..3).map(|k| x[k] * y[k]).sum();
            let scale = 0.5 * (e + g);
            Ok(if scale > 0.0 {
                (e - g).abs().max(f.abs()) / scale
            } else {
                0.0
            })
        })
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

impl SurfaceMesh {
    /// Number of closed loops formed by edges that belong to exactly one face.
    pub fn boundary_components(&self) -> usize {
        use std::collections::BTreeMap;
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &self.faces {
            for k in 0..4 {
                let (a, b) = (f[k], f[(k + 1) % 4]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let mut on_boundary = vec![false; self.vertices.len()];
        for (&(a, b), &c) in &count {
            if c == 1 {
                on_boundary[a] = true;
                on_boundary[b] = true;
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| on_boundary[v])
            .map(|v| find(&mut parent, v))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Wavefront OBJ text with a provenance header.
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let p = &self.provenance;
        let _ = writeln!(
            s,
            "# gaussmap-lab family={} params-hash={}",
            p.family.as_deref().unwrap_or("custom"),
            p.params_hash
        );
        let _ = writeln!(
            s,
            "# grid-hash={} closure={:e} diameter={:e}",
            p.grid_hash, self.max_closure, self.diameter
        );
        for w in &self.warnings {
            let _ = writeln!(s, "# {w}");
        }
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2]);
        }
        for n in &self.normals {
            let _ = writeln!(s, "vn {:.12} {:.12} {:.12}", n[0], n[1], n[2]);
        }
        for f in &self.faces {
            let _ = writeln!(
                s,
                "f {0}//{0} {1}//{1} {2}//{2} {3}//{3}",
                f[0] + 1,
                f[1] + 1,
                f[2] + 1,
                f[3] + 1
            );
        }
        s
    }
}
