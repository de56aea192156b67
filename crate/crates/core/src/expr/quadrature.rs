//! Composite Gauss–Legendre integration of holomorphic integrands along paths.
//!
//! Every smooth piece of a [`Path`] is mapped to `t ∈ [0, 1]`, split into panels,
//! and integrated with the 16-point Gauss–Legendre rule. The panel count doubles
//! until two consecutive results differ by less than the tolerance.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use thiserror::Error;

use super::ast::{EvalError, Expr, Params, DEFAULT_POLE_CLEARANCE};
use crate::Complex;

pub const GAUSS_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("integrand failed on the path: {0}")]
    Eval(#[from] EvalError),
    #[error("no convergence after {panels} panels (last step-doubling difference {difference:.3e}, tolerance {tol:.3e})")]
    NonConvergence { panels: usize, difference: f64, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute tolerance on the step-doubling difference.
    pub tol: f64,
    /// Upper bound on panels per smooth piece.
    pub max_panels: usize,
    /// Passed to [`Expr::eval_with`].
    pub pole_clearance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: 1e-10,
            max_panels: 1 << 14,
            pole_clearance: DEFAULT_POLE_CLEARANCE,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathKind {
    Segment { from: Complex, to: Complex },
    /// Consecutive points must be distinct.
    Polyline(Vec<Complex>),
    /// Circular arc starting at angle `start`, sweeping `sweep` radians (signed).
    Arc {
        center: Complex,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    /// Closed circle starting at angle 0, traversed counter-clockwise `turns` times
    /// (negative for clockwise).
    Circle {
        center: Complex,
        radius: f64,
        turns: f64,
    },
}

/// An integration contour plus the number of panels each smooth piece starts with.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    kind: PathKind,
    resolution: usize,
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Segment { from: Complex, to: Complex },
    Arc { center: Complex, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    fn point(&self, t: f64) -> (Complex, Complex) {
        match *self {
            Piece::Segment { from, to } => (from + (to - from) * t, to - from),
            Piece::Arc { center, radius, start, sweep } => {
                let e = Complex::from_polar(radius, start + sweep * t);
                (center + e, Complex::i() * sweep * e)
            }
        }
    }
}

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Path {
    pub fn new(kind: PathKind) -> Result<Path, QuadratureError> {
        let invalid = |m: &str| Err(QuadratureError::InvalidPath(m.to_string()));
        match &kind {
            PathKind::Segment { from, to } => {
                if !finite(*from) || !finite(*to) {
                    return invalid("non-finite endpoint");
                }
            }
            PathKind::Polyline(points) => {
                if points.len() < 2 {
                    return invalid("polyline needs at least two points");
                }
                if !points.iter().all(|p| finite(*p)) {
                    return invalid("non-finite polyline point");
                }
                if points.windows(2).any(|w| w[0] == w[1]) {
                    return invalid("consecutive polyline points coincide");
                }
            }
            PathKind::Arc { center, radius, start, sweep } => {
                if !(finite(*center) && start.is_finite() && sweep.is_finite()) {
                    return invalid("non-finite arc data");
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return invalid("arc radius must be positive");
                }
            }
            PathKind::Circle { center, radius, turns } => {
                if !(finite(*center) && turns.is_finite() && *turns != 0.0) {
                    return invalid("circle needs a finite center and nonzero turns");
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return invalid("circle radius must be positive");
                }
            }
        }
        Ok(Path { kind, resolution: 1 })
    }

    pub fn segment(from: Complex, to: Complex) -> Result<Path, QuadratureError> {
        Path::new(PathKind::Segment { from, to })
    }

    pub fn polyline(points: Vec<Complex>) -> Result<Path, QuadratureError> {
        Path::new(PathKind::Polyline(points))
    }

    pub fn arc(center: Complex, radius: f64, start: f64, sweep: f64) -> Result<Path, QuadratureError> {
        Path::new(PathKind::Arc { center, radius, start, sweep })
    }

    pub fn circle(center: Complex, radius: f64, turns: f64) -> Result<Path, QuadratureError> {
        Path::new(PathKind::Circle { center, radius, turns })
    }

    /// Sets the initial panel count per smooth piece (at least 1).
    pub fn with_resolution(mut self, panels: usize) -> Path {
        self.resolution = panels.max(1);
        self
    }

    pub fn kind(&self) -> &PathKind {
        &self.kind
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn start(&self) -> Complex {
        self.pieces()[0].point(0.0).0
    }

    pub fn end(&self) -> Complex {
        self.pieces().last().map(|p| p.point(1.0).0).unwrap_or_default()
    }

    fn pieces(&self) -> Vec<Piece> {
        match &self.kind {
            PathKind::Segment { from, to } => vec![Piece::Segment { from: *from, to: *to }],
            PathKind::Polyline(points) => points
                .windows(2)
                .map(|w| Piece::Segment { from: w[0], to: w[1] })
                .collect(),
            PathKind::Arc { center, radius, start, sweep } => vec![Piece::Arc {
                center: *center,
                radius: *radius,
                start: *start,
                sweep: *sweep,
            }],
            PathKind::Circle { center, radius, turns } => vec![Piece::Arc {
                center: *center,
                radius: *radius,
                start: 0.0,
                sweep: TAU * turns,
            }],
        }
    }
}

/// Nodes and weights of the 16-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre_16() -> &'static [(f64, f64); GAUSS_POINTS] {
    static RULE: OnceLock<[(f64, f64); GAUSS_POINTS]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_POINTS;
        let mut rule = [(0.0, 0.0); GAUSS_POINTS];
        for (i, slot) in rule.iter_mut().enumerate() {
            // Newton on P_n starting from the Tricomi estimate of the i-th root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule.sort_by(|a, b| a.0.total_cmp(&b.0));
        rule
    })
}

fn composite<F, const N: usize>(
    piece: &Piece,
    panels: usize,
    f: &F,
) -> Result<([Complex; N], f64), EvalError>
where
    F: Fn(Complex) -> Result<[Complex; N], EvalError>,
{
    let rule = gauss_legendre_16();
    let mut sum = [Complex::new(0.0, 0.0); N];
    let mut magnitude = 0.0;
    let width = 1.0 / panels as f64;
    for k in 0..panels {
        let mut panel = [Complex::new(0.0, 0.0); N];
        let mid = (k as f64 + 0.5) * width;
        for &(x, w) in rule {
            let (z, dz) = piece.point(mid + 0.5 * width * x);
            let values = f(z)?;
            for (acc, v) in panel.iter_mut().zip(values) {
                let term = v * dz * w;
                magnitude += term.norm() * 0.5 * width;
                *acc += term;
            }
        }
        for (s, p) in sum.iter_mut().zip(panel) {
            *s += p * (0.5 * width);
        }
    }
    Ok((sum, magnitude))
}

fn integrate_piece<F, const N: usize>(
    piece: &Piece,
    initial: usize,
    opts: &QuadratureOptions,
    f: &F,
) -> Result<[Complex; N], QuadratureError>
where
    F: Fn(Complex) -> Result<[Complex; N], EvalError>,
{
    // Endpoints are never Gauss nodes; probe them so a pole at a vertex is reported as such.
    f(piece.point(0.0).0)?;
    f(piece.point(1.0).0)?;
    let mut panels = initial;
    let (mut previous, mut previous_magnitude) = composite(piece, panels, f)?;
    loop {
        panels *= 2;
        let (current, magnitude) = composite(piece, panels, f)?;
        // ∫|f| keeps growing when the path runs through a pole, even if the
        // signed integral happens to cancel.
        let magnitude_settled = (magnitude - previous_magnitude).abs() <= 1e-3 * magnitude;
        let difference = previous
            .iter()
            .zip(current.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        // Below ~1e-14 of the absolute integral the difference is round-off, not truncation.
        if magnitude_settled && (difference <= opts.tol || difference <= 1e-14 * magnitude) {
            return Ok(current);
        }
        if panels * 2 > opts.max_panels {
            return Err(QuadratureError::NonConvergence {
                panels,
                difference,
                tol: opts.tol,
            });
        }
        previous = current;
        previous_magnitude = magnitude;
    }
}

/// Integrates a vector of holomorphic functions along `path` simultaneously.
pub fn integrate_path<F, const N: usize>(
    path: &Path,
    opts: &QuadratureOptions,
    f: F,
) -> Result<[Complex; N], QuadratureError>
where
    F: Fn(Complex) -> Result<[Complex; N], EvalError>,
{
    let mut total = [Complex::new(0.0, 0.0); N];
    for piece in path.pieces() {
        let part = integrate_piece(&piece, path.resolution, opts, &f)?;
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total)
}

/// `∫_path e(w) dw` for a single expression.
pub fn contour_integrate(
    e: &Expr,
    path: &Path,
    params: &Params,
    opts: &QuadratureOptions,
) -> Result<Complex, QuadratureError> {
    let bound = e.bind(params)?;
    let empty = Params::new();
    let [v] = integrate_path(path, opts, |z| Ok([bound.eval_with(z, &empty, opts.pole_clearance)?]))?;
    Ok(v)
}
