//! Executes a validated job and assembles its report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use isominimal::bjorling::{BjorlingData, BjorlingProblem};
use isominimal::expr::{Expr, Params};
use isominimal::isogeom::{
    classify_plane_section, iso_dot, parabolic_sphere_height, project_parabolic, project_radius,
    unproject_parabolic, SectionShape, Vec3,
};
use isominimal::verify::{
    dirichlet_energy, first_variation, graph_mean_curvature, laplacian_residual, max_grid_mean_curvature,
    to_normal_form, GraphPatch, GridSpec, NormalFormOptions,
};
use isominimal::weierstrass::{
    sample_surface, stationary_family_4d, SamplingOptions, SurfaceGrid, WeierstrassData,
};
use isominimal::Complex;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::export;
use crate::job::{Format, GraphJob, GraphSource, Job, OutputSpec, SchemaError, SurfaceJob, Task};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn numerical<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Numerical(e.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub summary: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub outputs: Vec<String>,
}

struct Builder {
    tol: Option<f64>,
    checks: Vec<Check>,
    summary: BTreeMap<String, Value>,
}

impl Builder {
    /// `residual ≤ tol`, with `tol` replaced by the command-line value when given.
    fn check(&mut self, name: &str, residual: f64, default_tol: f64) {
        let tol = self.tol.unwrap_or(default_tol);
        self.checks.push(Check { name: name.to_string(), residual, tol, pass: residual <= tol });
    }

    fn note(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }
}

pub struct Options {
    pub out_dir: PathBuf,
    pub tol: Option<f64>,
}

/// Runs `job`, writes its artifacts under `opts.out_dir` and returns the report
/// together with the path it was written to.
pub fn run(job: &Job, stem: &str, opts: &Options) -> Result<(Report, PathBuf), RunError> {
    let mut b = Builder { tol: opts.tol, checks: Vec::new(), summary: BTreeMap::new() };
    let mut result = None;
    let mut artifact: Option<String> = None;
    let out = job.output.as_ref();
    match &job.task {
        Task::Weierstrass(s) => {
            let grid = weierstrass(s, &mut b)?;
            artifact = surface_artifact(&grid, out)?;
        }
        Task::Bjorling(bj) => {
            let problem = BjorlingProblem::new(bj.curve.clone(), bj.data.clone(), &bj.params).map_err(numerical)?;
            let grid = problem.solve(&bj.domain, bj.s0, &SamplingOptions::default()).map_err(numerical)?;
            bjorling_checks(&grid, &bj.curve, &bj.data, &bj.params, &mut b)?;
            surface_checks(&grid, None, &mut b)?;
            artifact = surface_artifact(&grid, out)?;
        }
        Task::Project { points, w, radius } => {
            result = Some(project(points, w, *radius, &mut b)?);
        }
        Task::ClassifySection(plane) => {
            let image = classify_plane_section(*plane).map_err(numerical)?;
            let mut r = serde_json::Map::new();
            r.insert("kind".into(), image.kind().as_str().into());
            match image.shape {
                SectionShape::Circle { center, radius } => {
                    r.insert("center".into(), json!([center.re + 0.0, center.im + 0.0]));
                    r.insert("radius".into(), radius.into());
                    if image.is_r_geodesic {
                        b.check("circle_law", (radius * radius - 1.0 - center.norm_sqr()).abs(), 1e-12);
                    }
                }
                SectionShape::Line { a, b, offset } => {
                    r.insert("line".into(), json!({ "a": a + 0.0, "b": b + 0.0, "offset": offset + 0.0 }));
                }
                SectionShape::Point(p) => {
                    r.insert("point".into(), json!([p.re + 0.0, p.im + 0.0]));
                }
                SectionShape::Empty => {}
            }
            r.insert("r_geodesic".into(), image.is_r_geodesic.into());
            result = Some(Value::Object(r));
        }
        Task::VerifyGraph(g) => verify_graph(g, &mut b)?,
        Task::Family4d(f) => {
            let points = stationary_family_4d(
                &f.f,
                &f.g,
                &f.params,
                f.theta,
                &f.domain,
                f.basepoint,
                &isominimal::expr::QuadratureOptions::with_tol(1e-13),
            )
            .map_err(numerical)?;
            let spread = |k: usize| {
                let (lo, hi) = points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, x)| (lo.min(x.0[k]), hi.max(x.0[k])));
                hi - lo
            };
            let diff = points.iter().map(|(_, x)| (x.0[2] - x.0[3]).abs()).fold(0.0, f64::max);
            b.note("samples", points.len());
            b.note("x3_spread", spread(2));
            b.note("x4_spread", spread(3));
            b.note("max_abs_x3_minus_x4", diff);
            let (s, c) = f.theta.sin_cos();
            if s.abs() <= 1e-12 {
                b.check("x4_constant", spread(3), 1e-10);
            }
            if c.abs() <= 1e-12 {
                b.check("x3_constant", spread(2), 1e-10);
            }
            if (c - s).abs() <= 1e-12 {
                b.check("x3_equals_x4", diff, 1e-10);
            }
            if let Some(o) = out.filter(|o| o.format == Format::Csv) {
                let params: Vec<(f64, f64)> = (0..f.domain.len()).map(|k| f.domain.params_at(k)).collect();
                artifact = Some(export::csv4(&params, &points));
                let _ = o;
            }
        }
    }

    let mut outputs = Vec::new();
    fs::create_dir_all(&opts.out_dir).map_err(|source| RunError::Io { path: opts.out_dir.clone(), source })?;
    if let (Some(o), Some(text)) = (out, artifact) {
        write(&opts.out_dir.join(&o.path), &text)?;
        outputs.push(o.path.clone());
    }
    let report_name = match out {
        Some(o) if o.format == Format::JsonReport => o.path.clone(),
        _ => format!("{stem}.report.json"),
    };
    outputs.push(report_name.clone());
    let report = Report {
        kind: job.kind.as_str(),
        passed: b.checks.iter().all(|c| c.pass),
        checks: b.checks,
        summary: b.summary,
        result,
        outputs,
    };
    let path = opts.out_dir.join(&report_name);
    let mut text = serde_json::to_string_pretty(&report).map_err(numerical)?;
    text.push('\n');
    write(&path, &text)?;
    Ok((report, path))
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

fn surface_artifact(grid: &SurfaceGrid, out: Option<&OutputSpec>) -> Result<Option<String>, RunError> {
    let Some(o) = out else {
        return Ok(None);
    };
    let text = match o.format {
        Format::Obj => export::obj(grid),
        Format::Ply => export::ply(grid, &o.fields),
        Format::Csv => export::csv(grid, &o.fields),
        Format::JsonReport => return Ok(None),
    };
    text.map(Some).map_err(numerical)
}

fn weierstrass(s: &SurfaceJob, b: &mut Builder) -> Result<SurfaceGrid, RunError> {
    let data = WeierstrassData::new(s.f.clone(), s.g.clone(), s.convention, s.params.clone()).map_err(numerical)?;
    let grid = sample_surface(&data.phi(), &s.domain, s.basepoint, s.baseposition, s.theta, &SamplingOptions::default())
        .map_err(numerical)?;
    surface_checks(&grid, Some(&data.associate(s.theta)), b)?;
    Ok(grid)
}

/// Invariants every sampled minimal surface satisfies at its regular samples.
fn surface_checks(grid: &SurfaceGrid, data: Option<&WeierstrassData>, b: &mut Builder) -> Result<(), RunError> {
    let (mut iso, mut h, mut sphere, mut closed): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut regular = 0usize;
    for s in grid.regular_samples() {
        regular += 1;
        let scale = 1.0 + s.g11;
        iso = iso.max((iso_dot(s.x_u, s.x_u) - iso_dot(s.x_v, s.x_v)).abs() / scale);
        iso = iso.max(iso_dot(s.x_u, s.x_v).abs() / scale);
        h = h.max(s.h.abs());
        let xi = s.xi;
        sphere = sphere.max((xi.z - parabolic_sphere_height(xi.x, xi.y)).abs() / (1.0 + xi.x * xi.x + xi.y * xi.y));
        kmin = kmin.min(s.k);
        kmax = kmax.max(s.k);
        if let Some(d) = data {
            let k = d.gauss_curvature(s.z).map_err(numerical)?;
            closed = closed.max((k - s.k).abs() / (1.0 + k.abs()));
        }
    }
    let (n1, n2) = grid.shape();
    b.note("shape", json!([n1, n2]));
    b.note("samples", grid.samples.len());
    b.note("regular_samples", regular);
    if regular > 0 {
        b.note("min_K", kmin);
        b.note("max_K", kmax);
    }
    b.check("isothermality", iso, 1e-10);
    b.check("max_abs_H", h, 1e-8);
    b.check("xi_on_sphere", sphere, 1e-10);
    if data.is_some() {
        b.check("closed_K_vs_forms", closed, 1e-8);
    }
    Ok(())
}

fn eval3(e: &[Expr; 3], s: f64, params: &Params) -> Result<Vec3, RunError> {
    let z = Complex::new(s, 0.0);
    let v = |k: usize| e[k].eval(z, params).map(|c| c.re).map_err(numerical);
    Ok(Vec3::new(v(0)?, v(1)?, v(2)?))
}

fn bjorling_checks(
    grid: &SurfaceGrid,
    curve: &[Expr; 3],
    data: &BjorlingData,
    params: &Params,
    b: &mut Builder,
) -> Result<(), RunError> {
    let (mut contain, mut agree): (f64, f64) = (0.0, 0.0);
    for s in grid.samples.iter().filter(|s| s.z.im == 0.0) {
        let t = s.z.re;
        contain = contain.max(s.position.max_abs_diff(eval3(curve, t, params)?));
        let (got, want) = match data {
            BjorlingData::Tangent(e) => (s.x_v, eval3(e, t, params)?),
            BjorlingData::MinimalNormal(n) => (s.n_m, eval3(n, t, params)?),
            BjorlingData::ParabolicNormal(x) => (s.xi, eval3(x, t, params)?),
        };
        agree = agree.max(got.max_abs_diff(want));
    }
    b.check("curve_containment", contain, 1e-9);
    let name = match data {
        BjorlingData::Tangent(_) => "prescribed_tangent",
        BjorlingData::MinimalNormal(_) => "prescribed_minimal_normal",
        BjorlingData::ParabolicNormal(_) => "prescribed_parabolic_normal",
    };
    b.check(name, agree, 1e-8);
    Ok(())
}

fn project(
    points: &[Vec3],
    w: &[Complex],
    radius: Option<isominimal::isogeom::SphereRadius>,
    b: &mut Builder,
) -> Result<Value, RunError> {
    let mut projected = Vec::new();
    let mut round: f64 = 0.0;
    for (k, p) in points.iter().enumerate() {
        let image = match radius {
            Some(r) => project_radius(*p, r),
            None => project_parabolic(*p),
        }
        .map_err(|e| SchemaError { path: format!("points[{k}]"), message: e.to_string() })?;
        if radius.is_none() {
            let back = unproject_parabolic(image).map_err(numerical)?;
            round = round.max(back.max_abs_diff(*p) / (1.0 + p.euclidean_norm()));
        }
        projected.push(json!([image.re, image.im]));
    }
    let mut lifted = Vec::new();
    for (k, v) in w.iter().enumerate() {
        let p = unproject_parabolic(*v).map_err(|e| SchemaError { path: format!("w[{k}]"), message: e.to_string() })?;
        let back = project_parabolic(p).map_err(numerical)?;
        round = round.max((back - v).norm() / v.norm().max(1.0));
        lifted.push(json!([p.x, p.y, p.z]));
    }
    if radius.is_none() {
        b.check("round_trip", round, 1e-10);
    }
    let mut r = serde_json::Map::new();
    if !points.is_empty() {
        r.insert("projected".into(), Value::Array(projected));
    }
    if !w.is_empty() {
        r.insert("unprojected".into(), Value::Array(lifted));
    }
    Ok(Value::Object(r))
}

/// The same patch with the step halved.
fn refined(spec: GridSpec) -> GridSpec {
    GridSpec { nx: 2 * spec.nx - 1, ny: 2 * spec.ny - 1, ..spec }
}

fn verify_graph(g: &GraphJob, b: &mut Builder) -> Result<(), RunError> {
    let build = |spec: GridSpec| -> Result<GraphPatch, RunError> {
        match &g.source {
            GraphSource::Height(e) => GraphPatch::from_expr(spec, e, &g.params).map_err(numerical),
            GraphSource::Surface(s) => {
                let data = WeierstrassData::new(s.f.clone(), s.g.clone(), s.convention, s.params.clone())
                    .map_err(numerical)?;
                let grid = sample_surface(&data.phi(), &s.domain, s.basepoint, s.baseposition, s.theta, &SamplingOptions::default())
                    .map_err(numerical)?;
                to_normal_form(&grid, &spec, &NormalFormOptions::default()).map_err(numerical)
            }
        }
    };
    let coarse = build(g.grid)?;
    if coarse.heights.iter().any(|h| !h.is_finite()) {
        return Err(RunError::Numerical("height is not finite on the grid".into()));
    }
    let fine = build(refined(g.grid))?;
    let h1 = max_grid_mean_curvature(&coarse).map_err(numerical)?;
    let h2 = max_grid_mean_curvature(&fine).map_err(numerical)?;
    b.note("step", json!([coarse.hx, coarse.hy]));
    b.note("max_abs_H_half_step", h2);
    b.note("refinement_ratio", if h2 > 0.0 { Value::from(h1 / h2) } else { Value::Null });
    b.check("max_abs_H", h1, 1e-5);
    b.check("analytic_laplacian", laplacian_residual(&coarse).map_err(numerical)?, 1e-5);

    if let Some((v, eps)) = &g.variation {
        let vpatch = GraphPatch::from_expr(g.grid, v, &g.params).map_err(numerical)?;
        let mut heights = vpatch.heights.clone();
        for i in 0..g.grid.nx {
            for j in 0..g.grid.ny {
                if i == 0 || j == 0 || i + 1 == g.grid.nx || j + 1 == g.grid.ny {
                    heights[i * g.grid.ny + j] = 0.0;
                }
            }
        }
        let vpatch = GraphPatch::from_samples(g.grid, heights).map_err(numerical)?;
        let table = first_variation(&coarse.grid_only(), &vpatch, eps).map_err(numerical)?;
        let mut predicted = 0.0;
        for i in 1..g.grid.nx - 1 {
            for j in 1..g.grid.ny - 1 {
                let h = graph_mean_curvature(&coarse, i, j).map_err(numerical)?;
                predicted -= 2.0 * vpatch.at(i, j) * h * coarse.hx * coarse.hy;
            }
        }
        let half = 0.5 * dirichlet_energy(&vpatch);
        b.note("variation_rows", json!(table.rows));
        b.note("variation_linear", table.linear);
        b.note("variation_quadratic", table.quadratic);
        b.check("linear_vs_minus_2_int_VH", (table.linear - predicted).abs() / (1.0 + predicted.abs()), 1e-8);
        if half > 0.0 {
            b.check("quadratic_vs_half_dirichlet", (table.quadratic - half).abs() / half, 1e-8);
        }
    }
    Ok(())
}
