//! Representation-free checks on minimal surfaces written as graphs
//! `(x, y, F(x, y))`.
//!
//! In normal form the isotropic mean and Gaussian curvatures are
//! `H = ½(F₁₁ + F₂₂)` and `K = F₁₁F₂₂ − F₁₂²`, so a surface is minimal iff `F` is
//! harmonic. The relative area is `O* = ½ ∫ (1 + F₁² + F₂²)` and its first
//! variation in the direction `V` (vanishing on the boundary) is `−2 ∫ V H dA`.
//! (The area of the isotropic metric itself is `∫ dx dy` and has no variational
//! content, which is why the relative area is used.)

mod normal_form;

pub use normal_form::{to_normal_form, NormalFormOptions, SurfaceHeight};

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{EvalError, Expr, Params};
use crate::weierstrass::WeierstrassError;
use crate::Complex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("node ({i}, {j}) is on the boundary")]
    Boundary { i: usize, j: usize },
    #[error("top view is folded: triangles of both orientations")]
    Folded,
    #[error("point ({x}, {y}) is outside the top view of the samples")]
    OutsideImage { x: f64, y: f64 },
    #[error("could not invert the top view at ({x}, {y}): residual {residual:.3e}")]
    Newton { x: f64, y: f64, residual: f64 },
    #[error("grids do not match")]
    GridMismatch,
    #[error("variation does not vanish on the boundary (max {0:.3e})")]
    BoundaryNotZero(f64),
    #[error("patch has no analytic height")]
    NoAnalyticHeight,
    #[error("need at least three ε values")]
    TooFewEpsilons,
    #[error(transparent)]
    Surface(#[from] WeierstrassError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A height function that can be evaluated off the grid. `heights` returns the
/// values at `(x + dx, y + dy)` for every offset, computed consistently so that
/// difference quotients between them are meaningful.
pub trait HeightField: Send + Sync {
    fn heights(&self, x: f64, y: f64, offsets: &[(f64, f64)]) -> Result<Vec<f64>, VerifyError>;

    /// Parameter `z` of the point over `(x, y)`, when the height comes from a
    /// parametrized surface.
    fn parameter_at(&self, _x: f64, _y: f64) -> Result<Option<Complex>, VerifyError> {
        Ok(None)
    }
}

struct FnHeight<F>(F);

impl<F: Fn(f64, f64) -> f64 + Send + Sync> HeightField for FnHeight<F> {
    fn heights(&self, x: f64, y: f64, offsets: &[(f64, f64)]) -> Result<Vec<f64>, VerifyError> {
        Ok(offsets.iter().map(|&(dx, dy)| (self.0)(x + dx, y + dy)).collect())
    }
}

/// Rectangular sample grid of a height function, row-major: node `(i, j)` at
/// `(x0 + i·hx, y0 + j·hy)` has index `i·ny + j`.
#[derive(Clone)]
pub struct GraphPatch {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
    pub heights: Vec<f64>,
    analytic: Option<Arc<dyn HeightField>>,
}

impl std::fmt::Debug for GraphPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphPatch")
            .field("x0", &self.x0)
            .field("y0", &self.y0)
            .field("hx", &self.hx)
            .field("hy", &self.hy)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("analytic", &self.analytic.is_some())
            .finish()
    }
}

/// Node layout of a patch: `[x.0, x.1] × [y.0, y.1]` with `nx × ny` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<GridSpec, VerifyError> {
        let bad = |m: &str| Err(VerifyError::InvalidGrid(m.to_string()));
        if ![x.0, x.1, y.0, y.1].iter().all(|v| v.is_finite()) {
            return bad("non-finite bounds");
        }
        if !(x.0 < x.1 && y.0 < y.1) {
            return bad("ranges must be increasing");
        }
        if nx < 2 || ny < 2 {
            return bad("need at least two nodes per direction");
        }
        Ok(GridSpec { x, y, nx, ny })
    }

    /// Nodes spaced by `step` in both directions; the ranges must be multiples of it.
    pub fn with_step(x: (f64, f64), y: (f64, f64), step: f64) -> Result<GridSpec, VerifyError> {
        let count = |r: (f64, f64)| -> Result<usize, VerifyError> {
            let n = (r.1 - r.0) / step;
            if !(n.is_finite() && n >= 1.0) || (n - n.round()).abs() > 1e-9 * n {
                return Err(VerifyError::InvalidGrid(format!("range {r:?} is not a multiple of {step}")));
            }
            Ok(n.round() as usize + 1)
        };
        GridSpec::new(x, y, count(x)?, count(y)?)
    }

    pub fn hx(&self) -> f64 {
        (self.x.1 - self.x.0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y.1 - self.y.0) / (self.ny - 1) as f64
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let x = if i + 1 == self.nx { self.x.1 } else { self.x.0 + i as f64 * self.hx() };
        let y = if j + 1 == self.ny { self.y.1 } else { self.y.0 + j as f64 * self.hy() };
        (x, y)
    }
}

impl GraphPatch {
    pub fn from_samples(spec: GridSpec, heights: Vec<f64>) -> Result<GraphPatch, VerifyError> {
        if heights.len() != spec.nx * spec.ny {
            return Err(VerifyError::InvalidGrid(format!(
                "{} heights for a {}×{} grid",
                heights.len(),
                spec.nx,
                spec.ny
            )));
        }
        if !heights.iter().all(|h| h.is_finite()) {
            return Err(VerifyError::InvalidGrid("non-finite height".into()));
        }
        Ok(GraphPatch {
            x0: spec.x.0,
            y0: spec.y.0,
            hx: spec.hx(),
            hy: spec.hy(),
            nx: spec.nx,
            ny: spec.ny,
            heights,
            analytic: None,
        })
    }

    /// Samples `f` on the grid and keeps it as the analytic height.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<GraphPatch, VerifyError>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        GraphPatch::from_field(spec, Arc::new(FnHeight(f)))
    }

    pub fn from_field(spec: GridSpec, field: Arc<dyn HeightField>) -> Result<GraphPatch, VerifyError> {
        let mut heights = Vec::with_capacity(spec.nx * spec.ny);
        for i in 0..spec.nx {
            for j in 0..spec.ny {
                let (x, y) = spec.node(i, j);
                heights.push(field.heights(x, y, &[(0.0, 0.0)])?[0]);
            }
        }
        let mut g = GraphPatch::from_samples(spec, heights)?;
        g.analytic = Some(field);
        Ok(g)
    }

    /// Height `F(x, y) = Re e` for an expression in the parameters `x` and `y`
    /// (plus any others bound in `params`).
    pub fn from_expr(spec: GridSpec, e: &Expr, params: &Params) -> Result<GraphPatch, VerifyError> {
        let bound = e.clone();
        let mut base = params.clone();
        base.insert("x".to_string(), spec.x.0);
        base.insert("y".to_string(), spec.y.0);
        bound.eval(Complex::new(0.0, 0.0), &base)?;
        GraphPatch::from_fn(spec, move |x, y| {
            let mut p = base.clone();
            p.insert("x".to_string(), x);
            p.insert("y".to_string(), y);
            bound.eval(Complex::new(0.0, 0.0), &p).map(|v| v.re).unwrap_or(f64::NAN)
        })
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            x: (self.x0, self.x0 + self.hx * (self.nx - 1) as f64),
            y: (self.y0, self.y0 + self.hy * (self.ny - 1) as f64),
            nx: self.nx,
            ny: self.ny,
        }
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.heights[i * self.ny + j]
    }

    pub fn analytic(&self) -> Option<&Arc<dyn HeightField>> {
        self.analytic.as_ref()
    }

    /// The same samples without the analytic height, so every check uses the grid.
    pub fn grid_only(&self) -> GraphPatch {
        GraphPatch { analytic: None, ..self.clone() }
    }

    pub fn diameter(&self) -> f64 {
        let lx = self.hx * (self.nx - 1) as f64;
        let ly = self.hy * (self.ny - 1) as f64;
        lx.hypot(ly)
    }

    /// Step used for difference quotients of the analytic height.
    pub fn analytic_step(&self) -> f64 {
        1e-4 * self.diameter()
    }

    fn interior(&self, i: usize, j: usize) -> Result<(), VerifyError> {
        if i == 0 || j == 0 || i + 1 >= self.nx || j + 1 >= self.ny {
            return Err(VerifyError::Boundary { i, j });
        }
        Ok(())
    }

    fn second_differences(&self, i: usize, j: usize) -> Result<(f64, f64, f64), VerifyError> {
        self.interior(i, j)?;
        let f = |a: usize, b: usize| self.at(a, b);
        let (hx, hy) = (self.hx, self.hy);
        let fxx = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (hx * hx);
        let fyy = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (hy * hy);
        let fxy = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * hx * hy);
        Ok((fxx, fyy, fxy))
    }

    fn analytic_second_differences(&self, x: f64, y: f64) -> Result<(f64, f64, f64), VerifyError> {
        let field = self.analytic.as_ref().ok_or(VerifyError::NoAnalyticHeight)?;
        let h = self.analytic_step();
        let offsets = [
            (0.0, 0.0),
            (h, 0.0),
            (-h, 0.0),
            (0.0, h),
            (0.0, -h),
            (h, h),
            (h, -h),
            (-h, h),
            (-h, -h),
        ];
        let v = field.heights(x, y, &offsets)?;
        let fxx = (v[1] - 2.0 * v[0] + v[2]) / (h * h);
        let fyy = (v[3] - 2.0 * v[0] + v[4]) / (h * h);
        let fxy = (v[5] - v[6] - v[7] + v[8]) / (4.0 * h * h);
        Ok((fxx, fyy, fxy))
    }
}

/// `H = ½(F₁₁ + F₂₂)` by central differences at interior node `(i, j)`.
pub fn graph_mean_curvature(g: &GraphPatch, i: usize, j: usize) -> Result<f64, VerifyError> {
    let (fxx, fyy, _) = g.second_differences(i, j)?;
    Ok(0.5 * (fxx + fyy))
}

/// `K = F₁₁F₂₂ − F₁₂²` by central differences at interior node `(i, j)`.
pub fn graph_gauss_curvature(g: &GraphPatch, i: usize, j: usize) -> Result<f64, VerifyError> {
    let (fxx, fyy, fxy) = g.second_differences(i, j)?;
    Ok(fxx * fyy - fxy * fxy)
}

/// Mean curvature of the analytic height at `(x, y)`, step [`GraphPatch::analytic_step`].
pub fn analytic_mean_curvature(g: &GraphPatch, x: f64, y: f64) -> Result<f64, VerifyError> {
    let (fxx, fyy, _) = g.analytic_second_differences(x, y)?;
    Ok(0.5 * (fxx + fyy))
}

pub fn analytic_gauss_curvature(g: &GraphPatch, x: f64, y: f64) -> Result<f64, VerifyError> {
    let (fxx, fyy, fxy) = g.analytic_second_differences(x, y)?;
    Ok(fxx * fyy - fxy * fxy)
}

/// `max |ΔF|` over the interior nodes: the 5-point stencil on the grid, or on the
/// analytic height (at the nodes, with the analytic step) when the patch has one.
pub fn laplacian_residual(g: &GraphPatch) -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for i in 1..g.nx.saturating_sub(1) {
        for j in 1..g.ny.saturating_sub(1) {
            let (fxx, fyy) = if g.analytic.is_some() {
                let (x, y) = g.node(i, j);
                let (fxx, fyy, _) = g.analytic_second_differences(x, y)?;
                (fxx, fyy)
            } else {
                let (fxx, fyy, _) = g.second_differences(i, j)?;
                (fxx, fyy)
            };
            worst = worst.max((fxx + fyy).abs());
        }
    }
    Ok(worst)
}

/// `max |H|` over the interior nodes, using the grid samples only.
pub fn max_grid_mean_curvature(g: &GraphPatch) -> Result<f64, VerifyError> {
    Ok(0.5 * laplacian_residual(&g.grid_only())?)
}

/// Trapezoid weight of node `i` out of `n`.
fn trapezoid(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// `∫ F dA` by the composite trapezoid rule.
pub fn integrate(g: &GraphPatch) -> f64 {
    let mut s = 0.0;
    for i in 0..g.nx {
        for j in 0..g.ny {
            s += trapezoid(i, g.nx) * trapezoid(j, g.ny) * g.at(i, j);
        }
    }
    s * g.hx * g.hy
}

/// Discrete Dirichlet form `∫ ∇F·∇V`: forward differences on grid edges, trapezoid
/// weights across them.
fn dirichlet(f: &GraphPatch, v: &GraphPatch) -> f64 {
    let (nx, ny) = (f.nx, f.ny);
    let mut sx = 0.0;
    for i in 0..nx - 1 {
        for j in 0..ny {
            let df = f.at(i + 1, j) - f.at(i, j);
            let dv = v.at(i + 1, j) - v.at(i, j);
            sx += trapezoid(j, ny) * df * dv;
        }
    }
    let mut sy = 0.0;
    for i in 0..nx {
        for j in 0..ny - 1 {
            let df = f.at(i, j + 1) - f.at(i, j);
            let dv = v.at(i, j + 1) - v.at(i, j);
            sy += trapezoid(i, nx) * df * dv;
        }
    }
    sx * f.hy / f.hx + sy * f.hx / f.hy
}

/// `∫ (V₁² + V₂²)` in the same discretization as [`relative_area`].
pub fn dirichlet_energy(v: &GraphPatch) -> f64 {
    dirichlet(v, v)
}

/// Relative area `½ ∫ (1 + F₁² + F₂²)`. The gradient term uses the edge-based
/// Dirichlet form, whose first variation is exactly `−Σ V Δ_h F dA` with the
/// 5-point Laplacian `Δ_h`.
pub fn relative_area(g: &GraphPatch) -> f64 {
    let lx = g.hx * (g.nx - 1) as f64;
    let ly = g.hy * (g.ny - 1) as f64;
    0.5 * (lx * ly + dirichlet_energy(g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationTable {
    /// `(ε, O*(F + εV))`.
    pub rows: Vec<(f64, f64)>,
    pub constant: f64,
    /// Coefficient of `ε`: the first variation, `−2 ∫ V H dA`.
    pub linear: f64,
    /// Coefficient of `ε²`: `½ ∫ (V₁² + V₂²)`.
    pub quadratic: f64,
}

fn matching(a: &GraphPatch, b: &GraphPatch) -> bool {
    let close = |p: f64, q: f64| (p - q).abs() <= 1e-12 * (1.0 + p.abs().max(q.abs()));
    a.nx == b.nx && a.ny == b.ny && close(a.x0, b.x0) && close(a.y0, b.y0) && close(a.hx, b.hx) && close(a.hy, b.hy)
}

/// Relative area of `F + εV` for each `ε`, with a least-squares quadratic fit.
pub fn first_variation(f: &GraphPatch, v: &GraphPatch, eps: &[f64]) -> Result<VariationTable, VerifyError> {
    if !matching(f, v) {
        return Err(VerifyError::GridMismatch);
    }
    if eps.len() < 3 {
        return Err(VerifyError::TooFewEpsilons);
    }
    let mut boundary: f64 = 0.0;
    for i in 0..v.nx {
        for j in 0..v.ny {
            if i == 0 || j == 0 || i + 1 == v.nx || j + 1 == v.ny {
                boundary = boundary.max(v.at(i, j).abs());
            }
        }
    }
    if boundary > 0.0 {
        return Err(VerifyError::BoundaryNotZero(boundary));
    }
    let rows: Vec<(f64, f64)> = eps
        .iter()
        .map(|&e| {
            let heights = f.heights.iter().zip(&v.heights).map(|(a, b)| a + e * b).collect();
            let perturbed = GraphPatch { heights, analytic: None, ..f.clone() };
            (e, relative_area(&perturbed))
        })
        .collect();
    let [constant, linear, quadratic] = fit_quadratic(&rows).ok_or(VerifyError::TooFewEpsilons)?;
    Ok(VariationTable { rows, constant, linear, quadratic })
}

/// Least-squares `a + bε + cε²` through the rows.
fn fit_quadratic(rows: &[(f64, f64)]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for &(e, o) in rows {
        let basis = [1.0, e, e * e];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * o;
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        m.swap(col, pivot);
        if m[col][col].abs() < 1e-300 {
            return None;
        }
        for r in 0..3 {
            if r != col {
                let factor = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= factor * m[col][c];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use proptest::prelude::*;

    fn unit(n: usize) -> GridSpec {
        GridSpec::new((0.0, 1.0), (0.0, 1.0), n, n).unwrap()
    }

    fn expr_patch(src: &str, spec: GridSpec, p: f64) -> GraphPatch {
        let e = parse_expr(src, &["x", "y", "p"]).unwrap();
        let ps: Params = [("p".to_string(), p)].into_iter().collect();
        GraphPatch::from_expr(spec, &e, &ps).unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let spec = unit(11);
        assert_eq!(laplacian_residual(&GraphPatch::from_samples(spec, vec![0.0; 121]).unwrap()).unwrap(), 0.0);
        let saddle = expr_patch("x^2-y^2", spec, 1.0);
        assert!(laplacian_residual(&saddle.grid_only()).unwrap() < 1e-11);
        assert!(laplacian_residual(&saddle).unwrap() < 1e-6);
        let bowl = expr_patch("x^2+y^2", spec, 1.0);
        assert!((laplacian_residual(&bowl.grid_only()).unwrap() - 4.0).abs() < 1e-10);
        assert!((laplacian_residual(&bowl).unwrap() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn curvature_examples() {
        let p = 0.7;
        let spec = GridSpec::new((-1.0, 1.0), (-1.0, 1.0), 21, 21).unwrap();
        let g = expr_patch("(x^2-y^2)/(2*p)", spec, p);
        assert!(graph_mean_curvature(&g, 10, 10).unwrap().abs() < 1e-12);
        assert!((graph_gauss_curvature(&g, 3, 7).unwrap() + 1.0 / (p * p)).abs() < 1e-10);
        let g = expr_patch("x^2", spec, p);
        assert!((graph_mean_curvature(&g, 5, 5).unwrap() - 1.0).abs() < 1e-10);
        let g = expr_patch("3*x-2*y+1", spec, p);
        assert!(graph_gauss_curvature(&g, 5, 5).unwrap().abs() < 1e-10);
        assert_eq!(graph_mean_curvature(&g, 0, 5), Err(VerifyError::Boundary { i: 0, j: 5 }));
    }

    #[test]
    fn logarithmoid_graph_curvature() {
        let p = 1.2;
        let spec = GridSpec::new((1.0, 2.0), (-0.5, 0.5), 11, 11).unwrap();
        let g = GraphPatch::from_fn(spec, move |x, y| p * x.hypot(y).ln()).unwrap();
        let r: f64 = 1.5;
        assert!(analytic_mean_curvature(&g, r, 0.0).unwrap().abs() < 1e-6);
        let k = analytic_gauss_curvature(&g, r, 0.0).unwrap();
        assert!((k + p * p / r.powi(4)).abs() < 1e-6);
    }

    #[test]
    fn relative_area_examples() {
        let spec = unit(41);
        assert!((relative_area(&GraphPatch::from_samples(spec, vec![0.0; 41 * 41]).unwrap()) - 0.5).abs() < 1e-15);
        assert!((relative_area(&expr_patch("x", spec, 1.0)) - 1.0).abs() < 1e-14);
        let p = 0.9;
        let want = 0.5 * (1.0 + 2.0 / (3.0 * p * p));
        // Forward differences of x² are exact at edge midpoints, so the error is the
        // midpoint rule's h²/12 per direction.
        let got = relative_area(&expr_patch("(x^2-y^2)/(2*p)", spec, p));
        let h: f64 = 1.0 / 40.0;
        assert!((got - want).abs() < h * h / (p * p), "{got} vs {want}");
    }

    fn bump(spec: GridSpec) -> GraphPatch {
        let (x, y) = (spec.x, spec.y);
        let f = move |a: f64, b: f64| {
            let s = ((a - x.0) / (x.1 - x.0) * std::f64::consts::PI).sin();
            let t = ((b - y.0) / (y.1 - y.0) * std::f64::consts::PI).sin();
            s * s * t
        };
        let mut g = GraphPatch::from_fn(spec, f).unwrap().grid_only();
        for i in 0..g.nx {
            for j in 0..g.ny {
                if i == 0 || j == 0 || i + 1 == g.nx || j + 1 == g.ny {
                    g.heights[i * g.ny + j] = 0.0;
                }
            }
        }
        g
    }

    #[test]
    fn first_variation_examples() {
        let spec = unit(33);
        let v = bump(spec);
        let eps = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let minimal = expr_patch("(x^2-y^2)/(2*p)", spec, 0.8);
        let t = first_variation(&minimal, &v, &eps).unwrap();
        assert!(t.linear.abs() < 1e-12);
        assert!((t.quadratic - 0.5 * dirichlet_energy(&v)).abs() < 1e-12 * t.quadratic);
        assert_eq!(t.rows[2].1, relative_area(&minimal));
        let bowl = expr_patch("x^2+y^2", spec, 1.0);
        let t = first_variation(&bowl, &v, &eps).unwrap();
        assert!((t.linear + 4.0 * integrate(&v)).abs() < 1e-10);
        assert!(matches!(first_variation(&bowl, &bowl, &eps), Err(VerifyError::BoundaryNotZero(_))));
        assert_eq!(first_variation(&bowl, &bump(unit(9)), &eps).unwrap_err(), VerifyError::GridMismatch);
    }

    proptest! {
        #[test]
        fn first_variation_is_minus_sum_v_laplacian(
            a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -1.0f64..1.0,
        ) {
            // F = a x² + b xy + c y² + d x³: Δ_h F = 2a + 2c + 6dx exactly on the grid.
            let spec = unit(17);
            let f = GraphPatch::from_fn(spec, move |x, y| a * x * x + b * x * y + c * y * y + d * x * x * x).unwrap();
            let v = bump(spec);
            let t = first_variation(&f, &v, &[-0.5, 0.0, 0.5, 1.0]).unwrap();
            let mut want = 0.0;
            for i in 1..16 {
                for j in 1..16 {
                    let (x, _) = v.node(i, j);
                    want -= v.at(i, j) * (2.0 * a + 2.0 * c + 6.0 * d * x);
                }
            }
            want *= v.hx * v.hy;
            prop_assert!((t.linear - want).abs() < 1e-9);
        }
    }
}
