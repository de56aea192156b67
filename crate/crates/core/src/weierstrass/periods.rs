use rayon::prelude::*;

use super::{Domain, PhiCurve, WeierstrassError};
use crate::expr::{integrate_path, Expr, Params, Path, QuadratureOptions};
use crate::isogeom::Vec4;
use crate::Complex;

/// `∮ φ` around one loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodReport {
    pub period: [Complex; 3],
    /// `|Re ∮ φ_j| > tol` per component.
    pub flagged: [bool; 3],
}

impl PeriodReport {
    pub fn real(&self) -> [f64; 3] {
        self.period.map(|c| c.re)
    }

    pub fn has_real_period(&self) -> bool {
        self.flagged.iter().any(|&f| f)
    }
}

/// Real periods of `φ` around each closed loop.
pub fn check_real_periods(
    phi: &PhiCurve,
    loops: &[Path],
    tol: f64,
    opts: &QuadratureOptions,
) -> Result<Vec<PeriodReport>, WeierstrassError> {
    loops
        .iter()
        .map(|path| {
            if (path.end() - path.start()).norm() > 1e-12 * (1.0 + path.start().norm()) {
                return Err(WeierstrassError::InvalidDomain("period loop is not closed".into()));
            }
            let period = integrate_path(path, opts, |z| phi.eval_with(z, opts.pole_clearance))?;
            Ok(PeriodReport {
                period,
                flagged: period.map(|c| c.re.abs() > tol),
            })
        })
        .collect()
}

/// The stationary surfaces in four-dimensional Minkowski space
/// `f_θ = Re ∫ (F(1 − cos2θ·G²), iF(1 + cos2θ·G²), 2cosθ·FG, 2sinθ·FG)`,
/// sampled on `domain` from `z0` with `f_θ(z0) = 0`.
pub fn stationary_family_4d(
    f: &Expr,
    g: &Expr,
    params: &Params,
    theta: f64,
    domain: &Domain,
    z0: Complex,
    opts: &QuadratureOptions,
) -> Result<Vec<(Complex, Vec4)>, WeierstrassError> {
    domain.validate()?;
    domain.locate(z0)?;
    let f = f.bind(params)?;
    let g = g.bind(params)?;
    let empty = Params::new();
    let (c2, c1, s1) = ((2.0 * theta).cos(), theta.cos(), theta.sin());
    let integrand = |z: Complex| {
        let fv = f.eval_with(z, &empty, opts.pole_clearance)?;
        let gv = g.eval_with(z, &empty, opts.pole_clearance)?;
        let g2 = gv * gv;
        Ok([
            fv * (1.0 - c2 * g2),
            Complex::i() * fv * (1.0 + c2 * g2),
            2.0 * c1 * fv * gv,
            2.0 * s1 * fv * gv,
        ])
    };
    let raw: Vec<Result<(Complex, Vec4), WeierstrassError>> = (0..domain.len())
        .into_par_iter()
        .map(|k| {
            let mut total = [Complex::new(0.0, 0.0); 4];
            for path in domain.path_to(z0, k)? {
                let part = integrate_path(&path, opts, integrand)?;
                for (t, p) in total.iter_mut().zip(part) {
                    *t += p;
                }
            }
            Ok((domain.z_at(k), Vec4(total.map(|c| c.re))))
        })
        .collect();
    raw.into_iter().collect()
}
