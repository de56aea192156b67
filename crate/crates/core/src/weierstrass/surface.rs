use std::sync::Arc;

use rayon::prelude::*;

use super::{minimal_normal_of, parabolic_normal_of, tangents_of, Domain, PhiCurve, WeierstrassError,
    ISOTROPY_TOLERANCE,
};
use crate::expr::{integrate_path, Path, QuadratureOptions};
use crate::isogeom::{iso_dot, Vec3};
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    pub quadrature: QuadratureOptions,
    /// Samples with `|φ₁|² + |φ₂|² < singular_ratio² · max` are flagged non-regular.
    pub singular_ratio: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            quadrature: QuadratureOptions::with_tol(1e-13),
            singular_ratio: 1e-12,
        }
    }
}

/// One grid sample. Fields derived from the normal are NaN at non-regular samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Grid parameters `(u, v)` or `(r, φ)`.
    pub params: (f64, f64),
    pub z: Complex,
    pub position: Vec3,
    pub x_u: Vec3,
    pub x_v: Vec3,
    pub n_m: Vec3,
    pub xi: Vec3,
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    pub k: f64,
    pub h: f64,
    pub regular: bool,
}

/// Samples of `x_θ(z) = x₀ + Re(e^{−iθ} ∫_{z₀}^{z} φ)` on a structured domain.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub domain: Domain,
    pub z0: Complex,
    pub x0: Vec3,
    pub theta: f64,
    pub samples: Vec<Sample>,
    phi: Arc<PhiCurve>,
    options: SamplingOptions,
}

impl SurfaceGrid {
    /// `(n₁, n₂)`; sample `(i, j)` is at index `i·n₂ + j`.
    pub fn shape(&self) -> (usize, usize) {
        self.domain.shape()
    }

    pub fn at(&self, i: usize, j: usize) -> &Sample {
        &self.samples[i * self.shape().1 + j]
    }

    /// The rotated curve `e^{−iθ} φ` whose real part is integrated.
    pub fn phi(&self) -> &PhiCurve {
        &self.phi
    }

    pub fn regular_samples(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(|s| s.regular)
    }

    /// Position at an arbitrary `z`, integrating along the segment from sample `anchor`.
    pub fn position_from(&self, anchor: usize, z: Complex) -> Result<Vec3, WeierstrassError> {
        let a = &self.samples[anchor];
        if z == a.z {
            return Ok(a.position);
        }
        let path = Path::segment(a.z, z)?;
        Ok(a.position + real_part(&integrate_phi(&self.phi, &[path], &self.options.quadrature)?))
    }

    /// `(x_u, x_v)` of `x_θ` at an arbitrary `z`.
    pub fn tangents_at(&self, z: Complex) -> Result<(Vec3, Vec3), WeierstrassError> {
        self.phi.tangents(z)
    }
}

fn real_part(v: &[Complex; 3]) -> Vec3 {
    Vec3::new(v[0].re, v[1].re, v[2].re)
}

fn integrate_phi(
    phi: &PhiCurve,
    pieces: &[Path],
    opts: &QuadratureOptions,
) -> Result<[Complex; 3], WeierstrassError> {
    let mut total = [Complex::new(0.0, 0.0); 3];
    for path in pieces {
        let part = integrate_path(path, opts, |z| phi.eval_with(z, opts.pole_clearance))?;
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total)
}

/// Samples the surface `x₀ + cos θ·Re∫φ + sin θ·Im∫φ` over `domain`, integrating
/// from `z0` along the domain's axis-aligned (or radial-then-circular) contours.
pub fn sample_surface(
    phi: &PhiCurve,
    domain: &Domain,
    z0: Complex,
    x0: Vec3,
    theta: f64,
    options: &SamplingOptions,
) -> Result<SurfaceGrid, WeierstrassError> {
    domain.validate()?;
    domain.locate(z0)?;
    if !(theta.is_finite() && x0.is_finite()) {
        return Err(WeierstrassError::InvalidDomain("non-finite θ or base position".into()));
    }
    let phi = Arc::new(phi.associate(theta));
    let raw: Vec<Result<(Sample, f64, f64), WeierstrassError>> = (0..domain.len())
        .into_par_iter()
        .map(|k| sample_one(&phi, domain, z0, x0, k, &options.quadrature))
        .collect();
    let mut samples = Vec::with_capacity(raw.len());
    let mut isotropy = Vec::with_capacity(raw.len());
    for r in raw {
        let (s, residual, size) = r?;
        samples.push(s);
        isotropy.push((residual, size));
    }
    let scale = isotropy.iter().map(|&(_, size)| size).fold(0.0, f64::max);
    let floor = options.singular_ratio * options.singular_ratio * scale;
    for (s, &(residual, size)) in samples.iter_mut().zip(&isotropy) {
        if size <= floor {
            s.regular = false;
        } else if residual > ISOTROPY_TOLERANCE * size {
            return Err(WeierstrassError::NotIsotropic { z: s.z, residual });
        }
        if !s.regular {
            for v in [&mut s.n_m, &mut s.xi] {
                *v = Vec3::new(f64::NAN, f64::NAN, f64::NAN);
            }
            for f in [&mut s.h11, &mut s.h12, &mut s.h22, &mut s.k, &mut s.h] {
                *f = f64::NAN;
            }
        }
    }
    Ok(SurfaceGrid {
        domain: *domain,
        z0,
        x0,
        theta,
        samples,
        phi,
        options: *options,
    })
}

fn sample_one(
    phi: &PhiCurve,
    domain: &Domain,
    z0: Complex,
    x0: Vec3,
    k: usize,
    opts: &QuadratureOptions,
) -> Result<(Sample, f64, f64), WeierstrassError> {
    let z = domain.z_at(k);
    let pieces = domain.path_to(z0, k)?;
    let position = x0 + real_part(&integrate_phi(phi, &pieces, opts)?);
    let value = phi.eval_full(z)?;
    let (x_u, x_v) = tangents_of(&value.phi);
    let (g11, g12, g22) = (iso_dot(x_u, x_u), iso_dot(x_u, x_v), iso_dot(x_v, x_v));
    let mut s = Sample {
        params: domain.params_at(k),
        z,
        position,
        x_u,
        x_v,
        n_m: Vec3::default(),
        xi: Vec3::default(),
        g11,
        g12,
        g22,
        h11: 0.0,
        h12: 0.0,
        h22: 0.0,
        k: 0.0,
        h: 0.0,
        regular: false,
    };
    if let Some(n) = minimal_normal_of(&value.phi) {
        // x_uu = Re φ′, x_uv = −Im φ′, x_vv = −x_uu.
        let (x_uu, x_uv) = tangents_of(&value.dphi);
        let (h11, h12, h22) = (x_uu.dot(n), x_uv.dot(n), -x_uu.dot(n));
        let det_g = g11 * g22 - g12 * g12;
        s.n_m = n;
        s.xi = parabolic_normal_of(n);
        s.h11 = h11;
        s.h12 = h12;
        s.h22 = h22;
        s.k = (h11 * h22 - h12 * h12) / det_g;
        s.h = (g22 * h11 - 2.0 * g12 * h12 + g11 * h22) / (2.0 * det_g);
        s.regular = det_g > 0.0;
    }
    let [a, b, _] = value.phi;
    Ok((s, (a * a + b * b).norm(), a.norm_sqr() + b.norm_sqr()))
}
