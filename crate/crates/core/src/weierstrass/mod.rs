//! Weierstrass data, the isotropic complex curve `φ`, and the surfaces
//! `x = Re ∫ φ dz` it generates.
//!
//! Three normalizations of `φ` in terms of a pair `(F, G)` are supported:
//!
//! | convention        | φ                    | meaning of `G`                    | `W` in `II = Re(W dz²)` |
//! |-------------------|----------------------|-----------------------------------|-------------------------|
//! | `MinimalNormal`   | `(F, iF, −FG)`       | top view of the minimal normal    | `−FG′`                  |
//! | `ParabolicNormal` | `(F, −iF, −F/G)`     | stereographic image of `ξ`        | `FG′/G²`                |
//! | `Sato`            | `(F, iF, 2FG)`       | Sato's normalization              | `2FG′`                  |
//!
//! In every case `I = |F|² |dz|²`.
//!
//! A point is regular when `|φ₁|² + |φ₂|² > 0`, i.e. away from the zeros of `F`.

mod domain;
mod periods;
mod surface;

pub use domain::Domain;
pub use periods::{check_real_periods, stationary_family_4d, PeriodReport};
pub use surface::{sample_surface, Sample, SamplingOptions, SurfaceGrid};

use thiserror::Error;

use crate::expr::{EvalError, Expr, Params, QuadratureError};
use crate::isogeom::{cross, Vec3};
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    MinimalNormal,
    ParabolicNormal,
    Sato,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierstrassError {
    #[error("F vanishes identically")]
    ZeroF,
    #[error("G vanishes identically, which the parabolic-normal convention does not allow")]
    ZeroG,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("singular point z = {z}: F = 0")]
    Singular { z: Complex },
    #[error("non-admissible point z = {z}: Im(φ₁ φ̄₂) = 0")]
    NonAdmissible { z: Complex },
    #[error("φ is not isotropic at z = {z}: |φ₁² + φ₂²| = {residual:.3e}")]
    NotIsotropic { z: Complex, residual: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("base point {z0} is not in the domain")]
    BasePointOutside { z0: Complex },
    #[error("direction vector must be nonzero")]
    ZeroVector,
}

/// Holomorphic data `(F, G)` with its convention and parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassData {
    f: Expr,
    g: Expr,
    dg: Expr,
    convention: Convention,
    params: Params,
}

const PROBES: [(f64, f64); 5] = [(0.37, 0.21), (-0.83, 0.54), (1.31, -0.77), (-0.19, -1.63), (2.41, 1.12)];

/// True when `e` is zero at every probe point where it can be evaluated.
fn vanishes_identically(e: &Expr) -> bool {
    if e.is_zero() {
        return true;
    }
    let empty = Params::new();
    let mut evaluated = 0;
    for &(re, im) in &PROBES {
        if let Ok(v) = e.eval(Complex::new(re, im), &empty) {
            evaluated += 1;
            if v.norm() != 0.0 {
                return false;
            }
        }
    }
    evaluated > 0
}

impl WeierstrassData {
    pub fn new(f: Expr, g: Expr, convention: Convention, params: Params) -> Result<Self, WeierstrassError> {
        let f = f.bind(&params)?;
        let g = g.bind(&params)?;
        if vanishes_identically(&f) {
            return Err(WeierstrassError::ZeroF);
        }
        if convention == Convention::ParabolicNormal && vanishes_identically(&g) {
            return Err(WeierstrassError::ZeroG);
        }
        let dg = g.differentiate();
        Ok(WeierstrassData { f, g, dg, convention, params })
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// The data of the associate surface `x_θ`: every convention is linear in `F`,
    /// so `φ_θ = e^{−iθ} φ` amounts to replacing `F` by `e^{−iθ} F`.
    pub fn associate(&self, theta: f64) -> WeierstrassData {
        let rot = Expr::complex(Complex::from_polar(1.0, -theta));
        WeierstrassData {
            f: rot * self.f.clone(),
            ..self.clone()
        }
    }

    pub fn phi(&self) -> PhiCurve {
        let (f, g) = (self.f.clone(), self.g.clone());
        let components = match self.convention {
            Convention::MinimalNormal => [f.clone(), Expr::i() * f.clone(), -(f * g)],
            Convention::ParabolicNormal => [f.clone(), -(Expr::i() * f.clone()), -(f / g)],
            Convention::Sato => [f.clone(), Expr::i() * f.clone(), Expr::constant(2.0) * f * g],
        };
        PhiCurve::from_bound(components)
    }

    fn eval_fg(&self, z: Complex) -> Result<(Complex, Complex, Complex), WeierstrassError> {
        let empty = Params::new();
        let f = self.f.eval(z, &empty)?;
        let g = self.g.eval(z, &empty)?;
        let dg = self.dg.eval(z, &empty)?;
        Ok((f, g, dg))
    }

    fn regular_f(&self, z: Complex) -> Result<(Complex, Complex, Complex), WeierstrassError> {
        let (f, g, dg) = self.eval_fg(z)?;
        if f.norm() < 1e-12 * (1.0 + g.norm()) {
            return Err(WeierstrassError::Singular { z });
        }
        Ok((f, g, dg))
    }

    /// The coefficient `W` with `II = Re(W dz²)`.
    pub fn w_coefficient(&self, z: Complex) -> Result<Complex, WeierstrassError> {
        let (f, g, dg) = self.eval_fg(z)?;
        Ok(match self.convention {
            Convention::MinimalNormal => -f * dg,
            Convention::ParabolicNormal => f * dg / (g * g),
            Convention::Sato => 2.0 * f * dg,
        })
    }

    pub fn fundamental_forms(&self, z: Complex) -> Result<FundamentalForms, WeierstrassError> {
        let (f, _, _) = self.regular_f(z)?;
        let w = self.w_coefficient(z)?;
        Ok(FundamentalForms {
            g11: f.norm_sqr(),
            h11: w.re,
            h12: -w.im,
            h22: -w.re,
        })
    }

    /// Gaussian curvature from the closed formula of the convention.
    pub fn gauss_curvature(&self, z: Complex) -> Result<f64, WeierstrassError> {
        let (f, g, dg) = self.regular_f(z)?;
        Ok(match self.convention {
            Convention::MinimalNormal => -(dg / f).norm_sqr(),
            Convention::ParabolicNormal => -(dg / (f * g * g)).norm_sqr(),
            Convention::Sato => -4.0 * (dg / f).norm_sqr(),
        })
    }

    /// Classifies the tangent direction `v₁ x_u + v₂ x_v` by the phase of
    /// `W (v₁ + i v₂)²`: imaginary means asymptotic, real means principal.
    pub fn classify_direction(&self, z: Complex, v: (f64, f64)) -> Result<DirectionClass, WeierstrassError> {
        self.regular_f(z)?;
        classify_with_w(self.w_coefficient(z)?, v)
    }
}

/// Relative tolerance used to decide that `W (v₁ + i v₂)²` is real or imaginary.
pub const DIRECTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionClass {
    Asymptotic,
    Principal,
    Neither,
    /// `W = 0`: the second fundamental form vanishes and every direction is both
    /// asymptotic and principal.
    Flat,
}

pub fn classify_with_w(w: Complex, v: (f64, f64)) -> Result<DirectionClass, WeierstrassError> {
    let dz = Complex::new(v.0, v.1);
    if dz.norm() == 0.0 || !(v.0.is_finite() && v.1.is_finite()) {
        return Err(WeierstrassError::ZeroVector);
    }
    if w.norm() <= 1e-14 {
        return Ok(DirectionClass::Flat);
    }
    let q = w * dz * dz;
    let tol = DIRECTION_TOLERANCE * q.norm();
    Ok(if q.re.abs() <= tol {
        DirectionClass::Asymptotic
    } else if q.im.abs() <= tol {
        DirectionClass::Principal
    } else {
        DirectionClass::Neither
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    /// `g11 = g22`; `g12 = 0`.
    pub g11: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl FundamentalForms {
    pub fn gauss_curvature(&self) -> f64 {
        (self.h11 * self.h22 - self.h12 * self.h12) / (self.g11 * self.g11)
    }

    pub fn mean_curvature(&self) -> f64 {
        (self.h11 + self.h22) / (2.0 * self.g11)
    }
}

/// An isotropic holomorphic curve `φ = (φ₁, φ₂, φ₃)` with `φ₁² + φ₂² = 0`, with
/// parameters already substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiCurve {
    components: [Expr; 3],
    derivatives: [Expr; 3],
}

/// Relative tolerance of the numerical isotropy check `|φ₁² + φ₂²| ≤ tol·(|φ₁|² + |φ₂|²)`.
pub const ISOTROPY_TOLERANCE: f64 = 1e-10;

/// Values of `φ` and `φ′` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub phi: [Complex; 3],
    pub dphi: [Complex; 3],
}

impl PhiCurve {
    /// Builds `φ` from raw components; isotropy is checked where it is sampled.
    pub fn new(components: [Expr; 3], params: &Params) -> Result<PhiCurve, WeierstrassError> {
        let [a, b, c] = components;
        Ok(PhiCurve::from_bound([a.bind(params)?, b.bind(params)?, c.bind(params)?]))
    }

    fn from_bound(components: [Expr; 3]) -> PhiCurve {
        let derivatives = [
            components[0].differentiate(),
            components[1].differentiate(),
            components[2].differentiate(),
        ];
        PhiCurve { components, derivatives }
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.components
    }

    /// `e^{−iθ} φ`, the curve of the associate surface `x_θ`.
    pub fn associate(&self, theta: f64) -> PhiCurve {
        if theta == 0.0 {
            return self.clone();
        }
        let rot = Expr::complex(Complex::from_polar(1.0, -theta));
        let [a, b, c] = self.components.clone();
        PhiCurve::from_bound([rot.clone() * a, rot.clone() * b, rot * c])
    }

    pub fn eval(&self, z: Complex) -> Result<[Complex; 3], EvalError> {
        self.eval_with(z, crate::expr::DEFAULT_POLE_CLEARANCE)
    }

    pub fn eval_with(&self, z: Complex, clearance: f64) -> Result<[Complex; 3], EvalError> {
        let empty = Params::new();
        Ok([
            self.components[0].eval_with(z, &empty, clearance)?,
            self.components[1].eval_with(z, &empty, clearance)?,
            self.components[2].eval_with(z, &empty, clearance)?,
        ])
    }

    pub fn eval_full(&self, z: Complex) -> Result<PhiValue, EvalError> {
        let empty = Params::new();
        let d = &self.derivatives;
        Ok(PhiValue {
            phi: self.eval(z)?,
            dphi: [d[0].eval(z, &empty)?, d[1].eval(z, &empty)?, d[2].eval(z, &empty)?],
        })
    }

    /// `|φ₁² + φ₂²|` and the regularity indicator `|φ₁|² + |φ₂|²` at `z`.
    pub fn isotropy(&self, z: Complex) -> Result<(f64, f64), EvalError> {
        let [a, b, _] = self.eval(z)?;
        Ok(((a * a + b * b).norm(), a.norm_sqr() + b.norm_sqr()))
    }

    pub fn check_isotropic(&self, z: Complex) -> Result<(), WeierstrassError> {
        let (residual, size) = self.isotropy(z)?;
        if residual > ISOTROPY_TOLERANCE * size.max(1e-300) {
            return Err(WeierstrassError::NotIsotropic { z, residual });
        }
        Ok(())
    }

    /// `x_u = Re φ`, `x_v = −Im φ`.
    pub fn tangents(&self, z: Complex) -> Result<(Vec3, Vec3), WeierstrassError> {
        Ok(tangents_of(&self.eval(z)?))
    }

    /// `x_u × x_v` scaled to third component 1.
    pub fn minimal_normal(&self, z: Complex) -> Result<Vec3, WeierstrassError> {
        let phi = self.eval(z)?;
        minimal_normal_of(&phi).ok_or(WeierstrassError::NonAdmissible { z })
    }

    /// `ξ = (Ñ_m, ½(1 − ‖Ñ_m‖²))` on the parabolic unit sphere.
    pub fn parabolic_normal(&self, z: Complex) -> Result<Vec3, WeierstrassError> {
        Ok(parabolic_normal_of(self.minimal_normal(z)?))
    }
}

pub(crate) fn tangents_of(phi: &[Complex; 3]) -> (Vec3, Vec3) {
    (
        Vec3::new(phi[0].re, phi[1].re, phi[2].re),
        Vec3::new(-phi[0].im, -phi[1].im, -phi[2].im),
    )
}

pub(crate) fn minimal_normal_of(phi: &[Complex; 3]) -> Option<Vec3> {
    let (xu, xv) = tangents_of(phi);
    let n = cross(xu, xv);
    let size = phi[0].norm_sqr() + phi[1].norm_sqr();
    if !(n.z.abs() > 1e-12 * size) || size == 0.0 {
        return None;
    }
    Some(Vec3::new(n.x / n.z, n.y / n.z, 1.0))
}

pub(crate) fn parabolic_normal_of(n: Vec3) -> Vec3 {
    Vec3::new(n.x, n.y, 0.5 * (1.0 - n.x * n.x - n.y * n.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::isogeom::{on_parabolic_sphere, project_parabolic};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn params(p: f64) -> Params {
        [("p".to_string(), p)].into_iter().collect()
    }

    fn data(f: &str, g: &str, conv: Convention, p: f64) -> WeierstrassData {
        WeierstrassData::new(
            parse_expr(f, &["p"]).unwrap(),
            parse_expr(g, &["p"]).unwrap(),
            conv,
            params(p),
        )
        .unwrap()
    }

    fn close(a: Complex, b: Complex) -> bool {
        (a - b).norm() < 1e-13 * (1.0 + b.norm())
    }

    #[test]
    fn phi_of_each_convention() {
        let p = 1.7;
        let z = c(0.4, -0.9);
        let phi = data("1", "-z/p", Convention::MinimalNormal, p).phi().eval(z).unwrap();
        assert!(close(phi[0], c(1.0, 0.0)) && close(phi[1], c(0.0, 1.0)) && close(phi[2], z / p));
        let phi = data("1", "-z/p", Convention::ParabolicNormal, p).phi().eval(z).unwrap();
        assert!(close(phi[0], c(1.0, 0.0)) && close(phi[1], c(0.0, -1.0)) && close(phi[2], p / z));
        let phi = data("1/z", "-1/z", Convention::ParabolicNormal, p).phi().eval(z).unwrap();
        assert!(close(phi[0], 1.0 / z) && close(phi[1], c(0.0, -1.0) / z) && close(phi[2], c(1.0, 0.0)));
        let phi = data("z", "z^2", Convention::Sato, p).phi().eval(z).unwrap();
        assert!(close(phi[2], 2.0 * z * z * z));
    }

    #[test]
    fn zero_data_is_rejected() {
        let e = |s: &str| parse_expr(s, &[] as &[&str]).unwrap();
        assert_eq!(
            WeierstrassData::new(e("0"), e("z"), Convention::MinimalNormal, Params::new()),
            Err(WeierstrassError::ZeroF)
        );
        assert_eq!(
            WeierstrassData::new(e("z-z"), e("z"), Convention::MinimalNormal, Params::new()),
            Err(WeierstrassError::ZeroF)
        );
        assert_eq!(
            WeierstrassData::new(e("1"), e("0"), Convention::ParabolicNormal, Params::new()),
            Err(WeierstrassError::ZeroG)
        );
        assert!(WeierstrassData::new(e("1"), e("0"), Convention::MinimalNormal, Params::new()).is_ok());
    }

    #[test]
    fn tangent_examples() {
        let p = 2.0;
        let phi = data("1", "-z/p", Convention::MinimalNormal, p).phi();
        let (xu, xv) = phi.tangents(c(0.0, 0.0)).unwrap();
        assert_eq!(xu, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(xv, Vec3::new(0.0, -1.0, 0.0));
        let phi = data("1", "-z/p", Convention::ParabolicNormal, p).phi();
        let (xu, xv) = phi.tangents(c(1.0, 0.0)).unwrap();
        assert!(xu.max_abs_diff(Vec3::new(1.0, 0.0, p)) < 1e-15);
        assert!(xv.max_abs_diff(Vec3::new(0.0, 1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn minimal_normal_examples() {
        let p = 1.3;
        let phi = data("1", "-z/p", Convention::MinimalNormal, p).phi();
        let n = phi.minimal_normal(c(-p, 0.0)).unwrap();
        assert!(n.max_abs_diff(Vec3::new(1.0, 0.0, 1.0)) < 1e-15);
        let plane = data("1", "0", Convention::MinimalNormal, p).phi();
        for z in [c(0.0, 0.0), c(3.0, -1.0)] {
            assert_eq!(plane.minimal_normal(z).unwrap(), Vec3::new(0.0, 0.0, 1.0));
            assert_eq!(plane.parabolic_normal(z).unwrap(), Vec3::new(0.0, 0.0, 0.5));
        }
    }

    #[test]
    fn sato_normal_is_minus_twice_g() {
        // φ = (F, iF, 2FG) is the minimal-normal curve of the data (F, −2G).
        let sato = data("1", "z", Convention::Sato, 1.0).phi();
        let n = sato.minimal_normal(c(0.5, 0.0)).unwrap();
        assert!(n.max_abs_diff(Vec3::new(-1.0, 0.0, 1.0)) < 1e-15);
        let z = c(0.3, 0.8);
        let xi = sato.parabolic_normal(z).unwrap();
        let w = project_parabolic(xi).unwrap();
        assert!(close(w, -1.0 / (2.0 * z.conj())));
    }

    #[test]
    fn parabolic_normal_projects_to_g() {
        let d = data("z^2", "exp(z)/p", Convention::ParabolicNormal, 0.7);
        let phi = d.phi();
        assert!(matches!(phi.parabolic_normal(c(0.0, 0.0)), Err(WeierstrassError::NonAdmissible { .. })));
        for z in [c(0.4, -1.1), c(-0.8, 2.0)] {
            let xi = phi.parabolic_normal(z).unwrap();
            assert!(on_parabolic_sphere(xi, 1e-12));
            let g = d.g().eval(z, &Params::new()).unwrap();
            assert!((project_parabolic(xi).unwrap() - g).norm() < 1e-10 * (1.0 + g.norm()));
        }
        // G(z₀) = 1 gives ξ = (1, 0, 0).
        let d = data("1", "z", Convention::ParabolicNormal, 1.0);
        let xi = d.phi().parabolic_normal(c(1.0, 0.0)).unwrap();
        assert!(xi.max_abs_diff(Vec3::new(1.0, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn fundamental_form_examples() {
        let p = 1.9;
        let d = data("1", "-z/p", Convention::MinimalNormal, p);
        for z in [c(0.0, 0.0), c(1.0, 2.0)] {
            let ff = d.fundamental_forms(z).unwrap();
            assert!((ff.h11 - 1.0 / p).abs() < 1e-15 && ff.h12 == 0.0 && (ff.h22 + 1.0 / p).abs() < 1e-15);
            assert!((d.gauss_curvature(z).unwrap() + 1.0 / (p * p)).abs() < 1e-15);
        }
        // Logarithmoid p ln r at z = r: graph Hessian (p/r²)·diag(−1, 1) along the x-axis,
        // with the x-axis tangent x_u = (1, 0, p/r).
        let d = data("1", "-z/p", Convention::ParabolicNormal, p);
        let r = 1.4;
        let ff = d.fundamental_forms(c(r, 0.0)).unwrap();
        assert!((ff.h11 + p / (r * r)).abs() < 1e-14);
        assert!((ff.h22 - p / (r * r)).abs() < 1e-14);
        assert!(ff.h12.abs() < 1e-15);
        assert!((d.gauss_curvature(c(0.0, r)).unwrap() + p * p / r.powi(4)).abs() < 1e-14);
        let flat = data("1", "3", Convention::MinimalNormal, p);
        let ff = flat.fundamental_forms(c(0.2, 0.1)).unwrap();
        assert_eq!((ff.h11, ff.h12, ff.h22), (0.0, 0.0, 0.0));
        assert_eq!(flat.gauss_curvature(c(0.2, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn singular_point_is_reported() {
        let d = data("z", "z", Convention::MinimalNormal, 1.0);
        assert!(matches!(d.fundamental_forms(c(0.0, 0.0)), Err(WeierstrassError::Singular { .. })));
    }

    #[test]
    fn direction_examples() {
        let d = data("1", "-z/p", Convention::MinimalNormal, 1.5);
        let z = c(0.3, 0.2);
        assert_eq!(d.classify_direction(z, (1.0, 0.0)).unwrap(), DirectionClass::Principal);
        assert_eq!(d.classify_direction(z, (1.0, 1.0)).unwrap(), DirectionClass::Asymptotic);
        assert_eq!(d.classify_direction(z, (2.0, 1.0)).unwrap(), DirectionClass::Neither);
        assert_eq!(d.classify_direction(z, (0.0, 0.0)), Err(WeierstrassError::ZeroVector));
        let flat = data("1", "2", Convention::MinimalNormal, 1.0);
        assert_eq!(flat.classify_direction(z, (1.0, 0.0)).unwrap(), DirectionClass::Flat);
    }

    /// `h_ij = x_ij · N_m` from `φ′`, independent of the closed `W` formulas.
    fn forms_from_phi(phi: &PhiCurve, z: Complex) -> FundamentalForms {
        let v = phi.eval_full(z).unwrap();
        let (xu, xv) = tangents_of(&v.phi);
        let n = minimal_normal_of(&v.phi).unwrap();
        let (xuu, xuv) = tangents_of(&v.dphi);
        let xvv = -xuu;
        let g11 = crate::isogeom::iso_dot(xu, xu);
        assert!((crate::isogeom::iso_dot(xv, xv) - g11).abs() < 1e-12 * g11);
        FundamentalForms {
            g11,
            h11: xuu.dot(n),
            h12: xuv.dot(n),
            h22: xvv.dot(n),
        }
    }

    #[test]
    fn closed_forms_match_second_derivatives() {
        let cases = [
            ("1", "-z/p", Convention::MinimalNormal),
            ("z^2+1", "exp(z)", Convention::MinimalNormal),
            ("1", "-z/p", Convention::ParabolicNormal),
            ("cosh(z)", "z^3-p", Convention::ParabolicNormal),
            ("1/z", "-1/z", Convention::ParabolicNormal),
            ("1", "z", Convention::Sato),
            ("exp(z)", "sin(z)", Convention::Sato),
        ];
        for (f, g, conv) in cases {
            let d = data(f, g, conv, 1.3);
            for z in [c(0.4, 0.7), c(-1.1, 0.3), c(0.9, -1.6)] {
                let want = forms_from_phi(&d.phi(), z);
                let got = d.fundamental_forms(z).unwrap();
                let scale = 1.0 + want.h11.abs() + want.h12.abs();
                assert!((got.g11 - want.g11).abs() < 1e-12 * want.g11, "{f} {g}");
                assert!((got.h11 - want.h11).abs() < 1e-12 * scale, "{f} {g} {conv:?}: {got:?} {want:?}");
                assert!((got.h12 - want.h12).abs() < 1e-12 * scale, "{f} {g} {conv:?}");
                assert!((got.h22 - want.h22).abs() < 1e-12 * scale, "{f} {g} {conv:?}");
                let k = d.gauss_curvature(z).unwrap();
                assert!((k - got.gauss_curvature()).abs() < 1e-10 * (1.0 + k.abs()));
                assert!(k <= 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn associate_family_is_isometric(re in -1.5f64..1.5, im in -1.5f64..1.5) {
            let d = data("z^2+1", "exp(z)/p", Convention::MinimalNormal, 0.8);
            let z = c(re, im);
            let g0 = d.fundamental_forms(z).unwrap().g11;
            for theta in [std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2] {
                let g = forms_from_phi(&d.phi().associate(theta), z).g11;
                prop_assert!((g - g0).abs() <= 1e-12 * g0);
            }
        }

        #[test]
        fn conjugation_swaps_directions(
            re in -1.5f64..1.5,
            im in -1.5f64..1.5,
            theta in 0.0f64..6.3,
            angle in 0.0f64..std::f64::consts::PI,
            pick in 0usize..2,
        ) {
            let d = data("z^2+1", "exp(z)/p", Convention::ParabolicNormal, 0.8);
            let z = c(re, im);
            let w = d.associate(theta).w_coefficient(z).unwrap();
            prop_assume!(w.norm() > 1e-6);
            // Pick v so that v is asymptotic (pick 0) or principal (pick 1) for x_θ,
            // perturbed by a generic direction when `angle` is not special.
            let base = -w.arg() / 2.0 + if pick == 0 { std::f64::consts::FRAC_PI_4 } else { 0.0 };
            let a = base + angle.floor() * std::f64::consts::FRAC_PI_2;
            let v = (a.cos(), a.sin());
            let here = d.associate(theta).classify_direction(z, v).unwrap();
            let conj = d.associate(theta + std::f64::consts::FRAC_PI_2).classify_direction(z, v).unwrap();
            match here {
                DirectionClass::Asymptotic => prop_assert_eq!(conj, DirectionClass::Principal),
                DirectionClass::Principal => prop_assert_eq!(conj, DirectionClass::Asymptotic),
                _ => prop_assert!(false, "constructed direction not special: {:?}", here),
            }
        }
    }
}
