//! The isotropic Björling problem: the minimal surface through an analytic curve
//! `c(s)` with prescribed tangent planes along it.
//!
//! The tangent plane can be prescribed by a tangent field `e`, by the minimal
//! normal `N_m` (third component 1), or by the parabolic normal `ξ` on the unit
//! sphere. In every mode the surface is `x(z) = Re c(s₀) + Re ∫_{s₀}^{z} (c′ − i e) dz`
//! with `c`, `e` continued analytically by substituting `z` for `s`.
//!
//! For a normal `N_m` the tangent field is `e = N_m × c̃′` with `c̃′ = (c₁′, c₂′, 0)`.
//! Its top view is the quarter turn of `c̃′`, so `⟨c′, e⟩ = 0` and `‖e‖ = ‖c′‖`
//! hold identically, which keeps `c′ − i e` isotropic without a normalizing
//! square root. The parabolic normal is lifted to `N_m = ξ + ½(1 + ξ₁² + ξ₂²)(0, 0, 1)`,
//! with squares taken bilinearly so that the lift stays holomorphic.

use thiserror::Error;

use crate::expr::{EvalError, Expr, Params};
use crate::isogeom::{iso_dot, on_parabolic_sphere, Vec3};
use crate::weierstrass::{sample_surface, Domain, PhiCurve, SamplingOptions, SurfaceGrid, WeierstrassError};
use crate::Complex;

/// How the tangent planes along the curve are prescribed.
#[derive(Debug, Clone, PartialEq)]
pub enum BjorlingData {
    Tangent([Expr; 3]),
    MinimalNormal([Expr; 3]),
    ParabolicNormal([Expr; 3]),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BjorlingError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Weierstrass(#[from] WeierstrassError),
    #[error("s₀ = {0} must be a real point of the domain")]
    BasePoint(f64),
    #[error("curve is not real at s = {s}")]
    NotReal { s: f64 },
    #[error("top view of c′ vanishes at s = {s}")]
    Degenerate { s: f64 },
    #[error("prescribed tangent is not a quarter turn of c′ at s = {s} (residual {residual:.3e})")]
    TangentMismatch { s: f64, residual: f64 },
    #[error("minimal normal must have third component 1 at s = {s} (got {value})")]
    NormalNotUnit { s: f64, value: f64 },
    #[error("parabolic normal is off the unit sphere at s = {s}")]
    OffSphere { s: f64 },
    #[error("prescribed normal is not orthogonal to c′ at s = {s} (residual {residual:.3e})")]
    NotNormal { s: f64, residual: f64 },
}

/// Relative tolerance of the checks along the real axis.
pub const DATA_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BjorlingProblem {
    curve: [Expr; 3],
    dcurve: [Expr; 3],
    data: BjorlingData,
}

fn bind3(e: &[Expr; 3], params: &Params) -> Result<[Expr; 3], EvalError> {
    Ok([e[0].bind(params)?, e[1].bind(params)?, e[2].bind(params)?])
}

fn eval3(e: &[Expr; 3], z: Complex) -> Result<[Complex; 3], EvalError> {
    let empty = Params::new();
    Ok([e[0].eval(z, &empty)?, e[1].eval(z, &empty)?, e[2].eval(z, &empty)?])
}

fn real3(v: [Complex; 3]) -> Vec3 {
    Vec3::new(v[0].re, v[1].re, v[2].re)
}

fn imag_size(v: &[Complex; 3]) -> f64 {
    v.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
}

/// `(N_m × c̃′)` as expressions.
fn normal_cross_tangent(n: &[Expr; 3], dc: &[Expr; 3]) -> [Expr; 3] {
    [
        -(n[2].clone() * dc[1].clone()),
        n[2].clone() * dc[0].clone(),
        n[0].clone() * dc[1].clone() - n[1].clone() * dc[0].clone(),
    ]
}

/// `ξ + ½(1 + ξ₁² + ξ₂²)(0, 0, 1)`.
pub fn lift_parabolic_normal(xi: &[Expr; 3]) -> [Expr; 3] {
    let half = Expr::constant(0.5);
    let norm2 = xi[0].clone().powi(2) + xi[1].clone().powi(2);
    [
        xi[0].clone(),
        xi[1].clone(),
        xi[2].clone() + half * (Expr::constant(1.0) + norm2),
    ]
}

impl BjorlingProblem {
    pub fn new(curve: [Expr; 3], data: BjorlingData, params: &Params) -> Result<Self, BjorlingError> {
        let curve = bind3(&curve, params)?;
        let data = match data {
            BjorlingData::Tangent(e) => BjorlingData::Tangent(bind3(&e, params)?),
            BjorlingData::MinimalNormal(n) => BjorlingData::MinimalNormal(bind3(&n, params)?),
            BjorlingData::ParabolicNormal(x) => BjorlingData::ParabolicNormal(bind3(&x, params)?),
        };
        let dcurve = [curve[0].differentiate(), curve[1].differentiate(), curve[2].differentiate()];
        Ok(BjorlingProblem { curve, dcurve, data })
    }

    pub fn curve(&self) -> &[Expr; 3] {
        &self.curve
    }

    pub fn data(&self) -> &BjorlingData {
        &self.data
    }

    /// The tangent field `e` whose plane with `c′` is prescribed.
    pub fn tangent_field(&self) -> [Expr; 3] {
        match &self.data {
            BjorlingData::Tangent(e) => e.clone(),
            BjorlingData::MinimalNormal(n) => normal_cross_tangent(n, &self.dcurve),
            BjorlingData::ParabolicNormal(xi) => normal_cross_tangent(&lift_parabolic_normal(xi), &self.dcurve),
        }
    }

    /// `c′ − i e`.
    pub fn integrand(&self) -> PhiCurve {
        let e = self.tangent_field();
        let i = Expr::i();
        let comps = [
            self.dcurve[0].clone() - i.clone() * e[0].clone(),
            self.dcurve[1].clone() - i.clone() * e[1].clone(),
            self.dcurve[2].clone() - i * e[2].clone(),
        ];
        PhiCurve::new(comps, &Params::new()).expect("expressions are already bound")
    }

    /// Checks the data along the real axis at the given parameter values.
    pub fn validate(&self, s_values: &[f64]) -> Result<(), BjorlingError> {
        for &s in s_values {
            let z = Complex::new(s, 0.0);
            let c = eval3(&self.curve, z)?;
            let dc = eval3(&self.dcurve, z)?;
            let scale = 1.0 + c.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if imag_size(&c) > DATA_TOLERANCE * scale || imag_size(&dc) > DATA_TOLERANCE * scale {
                return Err(BjorlingError::NotReal { s });
            }
            let dc = real3(dc);
            let speed2 = iso_dot(dc, dc);
            if speed2 <= DATA_TOLERANCE * DATA_TOLERANCE * dc.dot(dc).max(1.0) {
                return Err(BjorlingError::Degenerate { s });
            }
            match &self.data {
                BjorlingData::Tangent(e) => {
                    let ev = eval3(e, z)?;
                    if imag_size(&ev) > DATA_TOLERANCE * (1.0 + speed2.sqrt()) {
                        return Err(BjorlingError::NotReal { s });
                    }
                    let e = real3(ev);
                    let residual = iso_dot(dc, e).abs().max((iso_dot(e, e) - speed2).abs()) / speed2;
                    if residual > DATA_TOLERANCE {
                        return Err(BjorlingError::TangentMismatch { s, residual });
                    }
                }
                BjorlingData::MinimalNormal(n) => {
                    let n = real3(eval3(n, z)?);
                    if (n.z - 1.0).abs() > DATA_TOLERANCE {
                        return Err(BjorlingError::NormalNotUnit { s, value: n.z });
                    }
                    self.check_orthogonal(s, n, dc)?;
                }
                BjorlingData::ParabolicNormal(xi) => {
                    let xi = real3(eval3(xi, z)?);
                    if !on_parabolic_sphere(xi, DATA_TOLERANCE) {
                        return Err(BjorlingError::OffSphere { s });
                    }
                    let n = real3(eval3(&lift_parabolic_normal(&self.data_exprs()), z)?);
                    self.check_orthogonal(s, n, dc)?;
                }
            }
        }
        Ok(())
    }

    fn data_exprs(&self) -> [Expr; 3] {
        match &self.data {
            BjorlingData::Tangent(e) | BjorlingData::MinimalNormal(e) | BjorlingData::ParabolicNormal(e) => e.clone(),
        }
    }

    fn check_orthogonal(&self, s: f64, n: Vec3, dc: Vec3) -> Result<(), BjorlingError> {
        let residual = n.dot(dc).abs() / (n.euclidean_norm() * dc.euclidean_norm());
        if residual > DATA_TOLERANCE {
            return Err(BjorlingError::NotNormal { s, residual });
        }
        Ok(())
    }

    /// Samples the solution on `domain`, anchored at `x(s₀) = c(s₀)`. The data are
    /// validated at the grid's real points (and at `s₀`).
    pub fn solve(&self, domain: &Domain, s0: f64, options: &SamplingOptions) -> Result<SurfaceGrid, BjorlingError> {
        let z0 = Complex::new(s0, 0.0);
        if !s0.is_finite() || domain.locate(z0).is_err() {
            return Err(BjorlingError::BasePoint(s0));
        }
        let mut s_values = vec![s0];
        s_values.extend(
            (0..domain.len())
                .map(|k| domain.z_at(k))
                .filter(|z| z.im == 0.0)
                .map(|z| z.re),
        );
        self.validate(&s_values)?;
        let x0 = real3(eval3(&self.curve, z0)?);
        Ok(sample_surface(&self.integrand(), domain, z0, x0, 0.0, options)?)
    }
}
