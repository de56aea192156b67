//! Job files: JSON, validated into typed jobs. Schema errors carry the path of
//! the offending field.

use std::collections::BTreeMap;

use isominimal::bjorling::BjorlingData;
use isominimal::expr::{parse_expr, validate_param_name, Expr, Params};
use isominimal::isogeom::{PlaneSection, SphereRadius, Vec3};
use isominimal::verify::GridSpec;
use isominimal::weierstrass::{Convention, Domain};
use isominimal::Complex;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

fn schema<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { path: path.into(), message: message.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Weierstrass,
    Bjorling,
    Project,
    ClassifySection,
    VerifyGraph,
    Family4d,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Weierstrass => "weierstrass",
            Kind::Bjorling => "bjorling",
            Kind::Project => "project",
            Kind::ClassifySection => "classify-section",
            Kind::VerifyGraph => "verify-graph",
            Kind::Family4d => "family4d",
        }
    }

    fn fields(self) -> &'static [&'static str] {
        match self {
            Kind::Weierstrass => &["convention", "F", "G", "params", "domain", "theta", "basepoint", "baseposition", "output"],
            Kind::Bjorling => &["curve", "data", "params", "domain", "basepoint", "output"],
            Kind::Project => &["points", "w", "radius", "output"],
            Kind::ClassifySection => &["plane", "output"],
            Kind::VerifyGraph => &[
                "height", "convention", "F", "G", "params", "domain", "theta", "basepoint", "baseposition", "grid",
                "variation", "eps", "output",
            ],
            Kind::Family4d => &["F", "G", "params", "domain", "theta", "basepoint", "output"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionName {
    Minimal,
    Parabolic,
    Sato,
}

impl From<ConventionName> for Convention {
    fn from(c: ConventionName) -> Convention {
        match c {
            ConventionName::Minimal => Convention::MinimalNormal,
            ConventionName::Parabolic => Convention::ParabolicNormal,
            ConventionName::Sato => Convention::Sato,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Rect { umin: f64, umax: f64, vmin: f64, vmax: f64, nu: usize, nv: usize },
    Annulus { rmin: f64, rmax: f64, phimin: f64, phimax: f64, nr: usize, nphi: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BjorlingSpec {
    Tangent([String; 3]),
    MinimalNormal([String; 3]),
    ParabolicNormal([String; 3]),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridJson {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Obj,
    Ply,
    Csv,
    JsonReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub enum Field {
    #[serde(rename = "position")]
    Position,
    #[serde(rename = "Nm")]
    Nm,
    #[serde(rename = "xi")]
    Xi,
    K,
    H,
}

fn default_fields() -> Vec<Field> {
    vec![Field::Position, Field::K, Field::H]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: String,
    pub format: Format,
    #[serde(default = "default_fields")]
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RadiusJson {
    Finite(f64),
    Named(String),
}

/// The job file as written.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub kind: Kind,
    pub convention: Option<ConventionName>,
    #[serde(rename = "F")]
    pub f: Option<String>,
    #[serde(rename = "G")]
    pub g: Option<String>,
    pub curve: Option<[String; 3]>,
    pub data: Option<BjorlingSpec>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub theta: f64,
    pub basepoint: Option<[f64; 2]>,
    pub baseposition: Option<[f64; 3]>,
    pub output: Option<OutputSpec>,
    pub points: Option<Vec<[f64; 3]>>,
    pub w: Option<Vec<[f64; 2]>>,
    pub radius: Option<RadiusJson>,
    pub plane: Option<[f64; 4]>,
    pub height: Option<String>,
    pub grid: Option<GridJson>,
    pub variation: Option<String>,
    pub eps: Option<Vec<f64>>,
}

/// Weierstrass data with everything needed to sample it.
#[derive(Debug, Clone)]
pub struct SurfaceJob {
    pub f: Expr,
    pub g: Expr,
    pub convention: Convention,
    pub params: Params,
    pub domain: Domain,
    pub theta: f64,
    pub basepoint: Complex,
    pub baseposition: Vec3,
}

#[derive(Debug, Clone)]
pub struct BjorlingJob {
    pub curve: [Expr; 3],
    pub data: BjorlingData,
    pub params: Params,
    pub domain: Domain,
    pub s0: f64,
}

#[derive(Debug, Clone)]
pub enum GraphSource {
    Height(Expr),
    Surface(SurfaceJob),
}

#[derive(Debug, Clone)]
pub struct GraphJob {
    pub source: GraphSource,
    pub params: Params,
    pub grid: GridSpec,
    pub variation: Option<(Expr, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct FamilyJob {
    pub f: Expr,
    pub g: Expr,
    pub params: Params,
    pub domain: Domain,
    pub theta: f64,
    pub basepoint: Complex,
}

#[derive(Debug, Clone)]
pub enum Task {
    Weierstrass(SurfaceJob),
    Bjorling(BjorlingJob),
    Project { points: Vec<Vec3>, w: Vec<Complex>, radius: Option<SphereRadius> },
    ClassifySection(PlaneSection),
    VerifyGraph(GraphJob),
    Family4d(FamilyJob),
}

#[derive(Debug, Clone)]
pub struct Job {
    pub kind: Kind,
    pub task: Task,
    pub output: Option<OutputSpec>,
}

/// Parses and validates a job file.
pub fn parse_job(text: &str) -> Result<Job, SchemaError> {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return schema("$", format!("invalid JSON: {e}")),
    };
    let Some(object) = value.as_object() else {
        return schema("$", "job must be a JSON object");
    };
    if let Some(kind) = object.get("kind") {
        if let Ok(kind) = serde_json::from_value::<Kind>(kind.clone()) {
            for key in object.keys() {
                if key != "kind" && !kind.fields().contains(&key.as_str()) {
                    return schema(key.as_str(), format!("not used by kind {}", kind.as_str()));
                }
            }
        }
    }
    let spec: JobSpec = match serde_path_to_error::deserialize(value) {
        Ok(s) => s,
        Err(e) => {
            let path = e.path().to_string();
            return schema(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string());
        }
    };
    validate(spec)
}

fn required<T: Clone>(v: &Option<T>, path: &str, kind: Kind) -> Result<T, SchemaError> {
    match v {
        Some(v) => Ok(v.clone()),
        None => schema(path, format!("required for kind {}", kind.as_str())),
    }
}

fn finite(path: &str, v: f64) -> Result<f64, SchemaError> {
    if v.is_finite() {
        Ok(v)
    } else {
        schema(path, "must be finite")
    }
}

fn params(spec: &JobSpec, extra_reserved: &[&str]) -> Result<(Params, Vec<String>), SchemaError> {
    let mut names = Vec::new();
    for (name, v) in &spec.params {
        let path = format!("params.{name}");
        if validate_param_name(name).is_err() || extra_reserved.contains(&name.as_str()) {
            return schema(path, "invalid or reserved parameter name");
        }
        finite(&path, *v)?;
        names.push(name.clone());
    }
    Ok((spec.params.clone(), names))
}

fn expression(path: &str, src: &str, names: &[String]) -> Result<Expr, SchemaError> {
    parse_expr(src, names).or_else(|e| schema(path, e.to_string()))
}

fn domain(spec: &JobSpec, kind: Kind) -> Result<Domain, SchemaError> {
    let d = required(&spec.domain, "domain", kind)?;
    let counts = |path: &str, n: usize| if n >= 2 { Ok(()) } else { schema(path, "must be at least 2") };
    let increasing = |path: &str, a: f64, b: f64| {
        finite(path, a)?;
        finite(path, b)?;
        if a < b {
            Ok(())
        } else {
            schema(path, "upper bound must exceed lower bound")
        }
    };
    match d {
        DomainSpec::Rect { umin, umax, vmin, vmax, nu, nv } => {
            increasing("domain.rect.umax", umin, umax)?;
            increasing("domain.rect.vmax", vmin, vmax)?;
            counts("domain.rect.nu", nu)?;
            counts("domain.rect.nv", nv)?;
            Domain::rect((umin, umax), (vmin, vmax), nu, nv).or_else(|e| schema("domain.rect", e.to_string()))
        }
        DomainSpec::Annulus { rmin, rmax, phimin, phimax, nr, nphi } => {
            if !(finite("domain.annulus.rmin", rmin)? > 0.0) {
                return schema("domain.annulus.rmin", "must be > 0");
            }
            increasing("domain.annulus.rmax", rmin, rmax)?;
            increasing("domain.annulus.phimax", phimin, phimax)?;
            if phimax - phimin > std::f64::consts::TAU * (1.0 + 1e-12) {
                return schema("domain.annulus.phimax", "angular range exceeds 2π");
            }
            counts("domain.annulus.nr", nr)?;
            counts("domain.annulus.nphi", nphi)?;
            Domain::annulus((rmin, rmax), (phimin, phimax), nr, nphi)
                .or_else(|e| schema("domain.annulus", e.to_string()))
        }
    }
}

fn basepoint(spec: &JobSpec, kind: Kind, domain: &Domain) -> Result<Complex, SchemaError> {
    let [re, im] = required(&spec.basepoint, "basepoint", kind)?;
    let z = Complex::new(finite("basepoint[0]", re)?, finite("basepoint[1]", im)?);
    domain.locate(z).or_else(|_| schema("basepoint", "outside the domain"))?;
    Ok(z)
}

fn surface_job(spec: &JobSpec, kind: Kind, names: &[String], params: &Params) -> Result<SurfaceJob, SchemaError> {
    let convention = required(&spec.convention, "convention", kind)?.into();
    let f = expression("F", &required(&spec.f, "F", kind)?, names)?;
    let g = expression("G", &required(&spec.g, "G", kind)?, names)?;
    let domain = domain(spec, kind)?;
    let basepoint = basepoint(spec, kind, &domain)?;
    let [x, y, z] = spec.baseposition.unwrap_or([0.0; 3]);
    for (k, v) in [x, y, z].into_iter().enumerate() {
        finite(&format!("baseposition[{k}]"), v)?;
    }
    Ok(SurfaceJob {
        f,
        g,
        convention,
        params: params.clone(),
        domain,
        theta: finite("theta", spec.theta)?,
        basepoint,
        baseposition: Vec3::new(x, y, z),
    })
}

fn triple(path: &str, src: &[String; 3], names: &[String]) -> Result<[Expr; 3], SchemaError> {
    Ok([
        expression(&format!("{path}[0]"), &src[0], names)?,
        expression(&format!("{path}[1]"), &src[1], names)?,
        expression(&format!("{path}[2]"), &src[2], names)?,
    ])
}

fn output(spec: &JobSpec, kind: Kind) -> Result<Option<OutputSpec>, SchemaError> {
    let Some(out) = spec.output.clone() else {
        return Ok(None);
    };
    if out.path.is_empty() {
        return schema("output.path", "must not be empty");
    }
    let allowed: &[Format] = match kind {
        Kind::Weierstrass | Kind::Bjorling => &[Format::Obj, Format::Ply, Format::Csv, Format::JsonReport],
        Kind::Family4d => &[Format::Csv, Format::JsonReport],
        _ => &[Format::JsonReport],
    };
    if !allowed.contains(&out.format) {
        return schema("output.format", format!("format not available for kind {}", kind.as_str()));
    }
    let mut seen = out.fields.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != out.fields.len() {
        return schema("output.fields", "duplicate field");
    }
    Ok(Some(out))
}

fn validate(spec: JobSpec) -> Result<Job, SchemaError> {
    let kind = spec.kind;
    let out = output(&spec, kind)?;
    let task = match kind {
        Kind::Weierstrass => {
            let (ps, names) = params(&spec, &[])?;
            Task::Weierstrass(surface_job(&spec, kind, &names, &ps)?)
        }
        Kind::Bjorling => {
            let (ps, names) = params(&spec, &[])?;
            let curve = triple("curve", &required(&spec.curve, "curve", kind)?, &names)?;
            let data = match required(&spec.data, "data", kind)? {
                BjorlingSpec::Tangent(v) => BjorlingData::Tangent(triple("data.tangent", &v, &names)?),
                BjorlingSpec::MinimalNormal(v) => BjorlingData::MinimalNormal(triple("data.minimal_normal", &v, &names)?),
                BjorlingSpec::ParabolicNormal(v) => {
                    BjorlingData::ParabolicNormal(triple("data.parabolic_normal", &v, &names)?)
                }
            };
            let domain = domain(&spec, kind)?;
            let z0 = basepoint(&spec, kind, &domain)?;
            if z0.im != 0.0 {
                return schema("basepoint[1]", "the base point of the curve must be real");
            }
            Task::Bjorling(BjorlingJob { curve, data, params: ps, domain, s0: z0.re })
        }
        Kind::Project => {
            let mut points = Vec::new();
            for (k, p) in spec.points.clone().unwrap_or_default().into_iter().enumerate() {
                for (j, v) in p.into_iter().enumerate() {
                    finite(&format!("points[{k}][{j}]"), v)?;
                }
                points.push(Vec3::new(p[0], p[1], p[2]));
            }
            let mut w = Vec::new();
            for (k, p) in spec.w.clone().unwrap_or_default().into_iter().enumerate() {
                for (j, v) in p.into_iter().enumerate() {
                    finite(&format!("w[{k}][{j}]"), v)?;
                }
                w.push(Complex::new(p[0], p[1]));
            }
            if points.is_empty() && w.is_empty() {
                return schema("points", "give points to project or w to unproject");
            }
            let radius = match spec.radius.clone() {
                None => None,
                Some(RadiusJson::Finite(r)) if r.is_finite() && r > 0.0 => Some(SphereRadius::Finite(r)),
                Some(RadiusJson::Named(s)) if s == "infinite" => Some(SphereRadius::Infinite),
                Some(_) => return schema("radius", "must be a positive number or \"infinite\""),
            };
            if radius.is_some() && !w.is_empty() {
                return schema("radius", "only applies to points");
            }
            Task::Project { points, w, radius }
        }
        Kind::ClassifySection => {
            let [a, b, c, d] = required(&spec.plane, "plane", kind)?;
            for (k, v) in [a, b, c, d].into_iter().enumerate() {
                finite(&format!("plane[{k}]"), v)?;
            }
            if a == 0.0 && b == 0.0 && c == 0.0 {
                return schema("plane", "(A, B, C) must be nonzero");
            }
            Task::ClassifySection(PlaneSection::new(a, b, c, d))
        }
        Kind::VerifyGraph => {
            let (ps, names) = params(&spec, &["x", "y"])?;
            let mut with_xy = names.clone();
            with_xy.extend(["x".to_string(), "y".to_string()]);
            let source = match &spec.height {
                Some(h) => {
                    for key in ["convention", "F", "G", "domain", "basepoint", "baseposition"] {
                        let present = match key {
                            "convention" => spec.convention.is_some(),
                            "F" => spec.f.is_some(),
                            "G" => spec.g.is_some(),
                            "domain" => spec.domain.is_some(),
                            "basepoint" => spec.basepoint.is_some(),
                            _ => spec.baseposition.is_some(),
                        };
                        if present {
                            return schema(key, "not used together with height");
                        }
                    }
                    GraphSource::Height(expression("height", h, &with_xy)?)
                }
                None => GraphSource::Surface(surface_job(&spec, kind, &names, &ps)?),
            };
            let g = required(&spec.grid, "grid", kind)?;
            if g.nx < 3 || g.ny < 3 {
                return schema(if g.nx < 3 { "grid.nx" } else { "grid.ny" }, "must be at least 3");
            }
            let grid = GridSpec::new((g.xmin, g.xmax), (g.ymin, g.ymax), g.nx, g.ny)
                .or_else(|e| schema("grid", e.to_string()))?;
            let variation = match (&spec.variation, &spec.eps) {
                (None, None) => None,
                (Some(v), eps) => {
                    let eps = eps.clone().unwrap_or_else(|| vec![-0.1, -0.05, 0.0, 0.05, 0.1]);
                    if eps.len() < 3 {
                        return schema("eps", "need at least three values");
                    }
                    for (k, e) in eps.iter().enumerate() {
                        finite(&format!("eps[{k}]"), *e)?;
                    }
                    Some((expression("variation", v, &with_xy)?, eps))
                }
                (None, Some(_)) => return schema("eps", "requires variation"),
            };
            Task::VerifyGraph(GraphJob { source, params: ps, grid, variation })
        }
        Kind::Family4d => {
            let (ps, names) = params(&spec, &[])?;
            let f = expression("F", &required(&spec.f, "F", kind)?, &names)?;
            let g = expression("G", &required(&spec.g, "G", kind)?, &names)?;
            let domain = domain(&spec, kind)?;
            let basepoint = basepoint(&spec, kind, &domain)?;
            Task::Family4d(FamilyJob { f, g, params: ps, domain, theta: finite("theta", spec.theta)?, basepoint })
        }
    };
    Ok(Job { kind, task, output: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> SchemaError {
        parse_job(text).unwrap_err()
    }

    #[test]
    fn zero_inner_radius_names_the_field() {
        let e = err(r#"{"kind":"weierstrass","convention":"parabolic","F":"1","G":"-z/p","params":{"p":1},
            "domain":{"annulus":{"rmin":0,"rmax":2,"phimin":0,"phimax":6,"nr":4,"nphi":4}},"basepoint":[1,0]}"#);
        assert_eq!(e.path, "domain.annulus.rmin");
    }

    #[test]
    fn type_errors_carry_the_path() {
        let e = err(r#"{"kind":"classify-section","plane":[0,0,"one",0]}"#);
        assert_eq!(e.path, "plane[2]");
        let e = err(r#"{"kind":"weierstrass","convention":"parabolic","F":"1","G":"-z/p","params":{"p":1},
            "domain":{"rect":{"umin":0,"umax":1,"vmin":0,"vmax":1,"nu":2}},"basepoint":[0,0]}"#);
        assert!(e.path.starts_with("domain"), "{e}");
    }

    #[test]
    fn unbound_parameter_is_a_schema_error() {
        let e = err(r#"{"kind":"weierstrass","convention":"minimal","F":"1","G":"-z/q","params":{"p":1},
            "domain":{"rect":{"umin":0,"umax":1,"vmin":0,"vmax":1,"nu":2,"nv":2}},"basepoint":[0,0]}"#);
        assert_eq!(e.path, "G");
    }

    #[test]
    fn unused_fields_are_rejected() {
        let e = err(r#"{"kind":"classify-section","plane":[0,0,1,0],"theta":1}"#);
        assert_eq!(e.path, "theta");
        let e = err(r#"{"kind":"classify-section","plane":[0,0,1,0],"bogus":1}"#);
        assert_eq!(e.path, "bogus");
    }

    #[test]
    fn base_point_must_lie_in_the_domain() {
        let e = err(r#"{"kind":"weierstrass","convention":"minimal","F":"1","G":"z",
            "domain":{"rect":{"umin":0,"umax":1,"vmin":0,"vmax":1,"nu":2,"nv":2}},"basepoint":[2,0]}"#);
        assert_eq!(e.path, "basepoint");
    }

    #[test]
    fn section_job() {
        let job = parse_job(r#"{"kind":"classify-section","plane":[0,0,1,0]}"#).unwrap();
        assert!(matches!(job.task, Task::ClassifySection(s) if s == PlaneSection::new(0.0, 0.0, 1.0, 0.0)));
    }
}
