//! Resampling a parametrized surface as a graph over its top view.
//!
//! Every quad of the parameter grid is split into two triangles, the top views of
//! the triangles are bucketed, and each target node is located by barycentric
//! coordinates. Linear interpolation in the triangle gives the height and an
//! initial parameter `z`; Newton's method on the top view then solves
//! `top(x(z)) = (x, y)` exactly, with `x(z)` integrated from the nearest sample.

use std::sync::Arc;

use rayon::prelude::*;

use super::{GraphPatch, GridSpec, HeightField, VerifyError};
use crate::isogeom::Vec3;
use crate::weierstrass::SurfaceGrid;
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormOptions {
    /// Refine interpolated heights by Newton inversion of the top view.
    pub polish: bool,
}

impl Default for NormalFormOptions {
    fn default() -> Self {
        NormalFormOptions { polish: true }
    }
}

struct Locator {
    tops: Vec<(f64, f64)>,
    triangles: Vec<[usize; 3]>,
    origin: (f64, f64),
    cell: (f64, f64),
    shape: (usize, usize),
    buckets: Vec<Vec<u32>>,
}

fn signed_area(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    0.5 * ((b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1))
}

impl Locator {
    fn new(grid: &SurfaceGrid) -> Result<Locator, VerifyError> {
        let (n1, n2) = grid.shape();
        let tops: Vec<(f64, f64)> = grid.samples.iter().map(|s| (s.position.x, s.position.y)).collect();
        let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
        for &(x, y) in &tops {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        let extent = ((hi.0 - lo.0).max(1e-300), (hi.1 - lo.1).max(1e-300));
        let degenerate = 1e-14 * extent.0 * extent.1;
        let mut triangles = Vec::with_capacity(2 * (n1 - 1) * (n2 - 1));
        let (mut positive, mut negative) = (0usize, 0usize);
        for i in 0..n1 - 1 {
            for j in 0..n2 - 1 {
                let a = i * n2 + j;
                let b = (i + 1) * n2 + j;
                let c = (i + 1) * n2 + j + 1;
                let d = i * n2 + j + 1;
                for t in [[a, b, c], [a, c, d]] {
                    let area = signed_area(tops[t[0]], tops[t[1]], tops[t[2]]);
                    if area > degenerate {
                        positive += 1;
                    } else if area < -degenerate {
                        negative += 1;
                    } else {
                        continue;
                    }
                    triangles.push(t);
                }
            }
        }
        if positive > 0 && negative > 0 {
            return Err(VerifyError::Folded);
        }
        let side = ((triangles.len() as f64).sqrt().ceil() as usize).max(1);
        let shape = (side, side);
        let cell = (extent.0 / side as f64, extent.1 / side as f64);
        let mut buckets = vec![Vec::new(); side * side];
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        for (k, t) in triangles.iter().enumerate() {
            let xs = t.map(|v| tops[v].0);
            let ys = t.map(|v| tops[v].1);
            let (x0, x1) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            let (y0, y1) = (ys.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            let (i0, i1) = (clamp((x0 - lo.0) / cell.0, side), clamp((x1 - lo.0) / cell.0, side));
            let (j0, j1) = (clamp((y0 - lo.1) / cell.1, side), clamp((y1 - lo.1) / cell.1, side));
            for bi in i0..=i1 {
                for bj in j0..=j1 {
                    buckets[bi * side + bj].push(k as u32);
                }
            }
        }
        Ok(Locator { tops, triangles, origin: lo, cell, shape, buckets })
    }

    /// Containing triangle and barycentric weights of `(x, y)`.
    fn locate(&self, x: f64, y: f64) -> Option<([usize; 3], [f64; 3])> {
        let bi = ((x - self.origin.0) / self.cell.0).floor();
        let bj = ((y - self.origin.1) / self.cell.1).floor();
        let (nb, mb) = self.shape;
        // Points on the far edge of the bounding box belong to the last bucket.
        let fix = |b: f64, n: usize| -> Option<usize> {
            if b < -1.0 || b > n as f64 || !b.is_finite() {
                None
            } else {
                Some((b.max(0.0) as usize).min(n - 1))
            }
        };
        let (bi, bj) = (fix(bi, nb)?, fix(bj, mb)?);
        let mut best: Option<([usize; 3], [f64; 3])> = None;
        let mut best_min = f64::NEG_INFINITY;
        for &k in &self.buckets[bi * mb + bj] {
            let t = self.triangles[k as usize];
            let [a, b, c] = t.map(|v| self.tops[v]);
            let total = signed_area(a, b, c);
            let w = [
                signed_area((x, y), b, c) / total,
                signed_area(a, (x, y), c) / total,
                signed_area(a, b, (x, y)) / total,
            ];
            let min = w[0].min(w[1]).min(w[2]);
            if min > best_min {
                best_min = min;
                best = Some((t, w));
            }
        }
        if best_min >= -1e-9 {
            best
        } else {
            None
        }
    }
}

/// Height of a sampled surface over its top view, evaluated by Newton inversion.
pub struct SurfaceHeight {
    grid: SurfaceGrid,
    locator: Locator,
}

impl SurfaceHeight {
    pub fn new(grid: SurfaceGrid) -> Result<SurfaceHeight, VerifyError> {
        let locator = Locator::new(&grid)?;
        Ok(SurfaceHeight { grid, locator })
    }

    pub fn grid(&self) -> &SurfaceGrid {
        &self.grid
    }

    /// Interpolated height, interpolated parameter and the index of the nearest vertex.
    fn initial(&self, x: f64, y: f64) -> Result<(f64, Complex, usize), VerifyError> {
        let (t, w) = self.locator.locate(x, y).ok_or(VerifyError::OutsideImage { x, y })?;
        let s = &self.grid.samples;
        let height = w[0] * s[t[0]].position.z + w[1] * s[t[1]].position.z + w[2] * s[t[2]].position.z;
        let z = s[t[0]].z * w[0] + s[t[1]].z * w[1] + s[t[2]].z * w[2];
        let k = (0..3).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap_or(0);
        Ok((height, z, t[k]))
    }

    /// Solves `top(x(z)) = target` starting from `z`, integrating from `anchor`.
    fn invert(&self, anchor: usize, mut z: Complex, target: (f64, f64)) -> Result<(Vec3, Complex), VerifyError> {
        let scale = 1.0 + target.0.hypot(target.1);
        let mut best: Option<(f64, Vec3, Complex)> = None;
        for _ in 0..40 {
            let pos = self.grid.position_from(anchor, z)?;
            let r = (pos.x - target.0, pos.y - target.1);
            let size = r.0.hypot(r.1);
            let improved = best.as_ref().is_none_or(|b| size < b.0);
            if improved {
                best = Some((size, pos, z));
            }
            if size <= 1e-15 * scale || (!improved && size <= 1e-11 * scale) {
                break;
            }
            let (xu, xv) = self.grid.tangents_at(z)?;
            let det = xu.x * xv.y - xv.x * xu.y;
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let du = (-r.0 * xv.y + r.1 * xv.x) / det;
            let dv = (-xu.x * r.1 + xu.y * r.0) / det;
            z += Complex::new(du, dv);
        }
        match best {
            Some((size, pos, z)) if size <= 1e-9 * scale => Ok((pos, z)),
            Some((size, _, _)) => Err(VerifyError::Newton { x: target.0, y: target.1, residual: size }),
            None => Err(VerifyError::Newton { x: target.0, y: target.1, residual: f64::INFINITY }),
        }
    }
}

impl HeightField for SurfaceHeight {
    fn heights(&self, x: f64, y: f64, offsets: &[(f64, f64)]) -> Result<Vec<f64>, VerifyError> {
        let (_, z, anchor) = self.initial(x, y)?;
        let mut out = Vec::with_capacity(offsets.len());
        for &(dx, dy) in offsets {
            out.push(self.invert(anchor, z, (x + dx, y + dy))?.0.z);
        }
        Ok(out)
    }

    fn parameter_at(&self, x: f64, y: f64) -> Result<Option<Complex>, VerifyError> {
        let (_, z, anchor) = self.initial(x, y)?;
        Ok(Some(self.invert(anchor, z, (x, y))?.1))
    }
}

/// Resamples `grid` as a graph on `spec`, which must lie inside the top view.
pub fn to_normal_form(grid: &SurfaceGrid, spec: &GridSpec, options: &NormalFormOptions) -> Result<GraphPatch, VerifyError> {
    let field = SurfaceHeight::new(grid.clone())?;
    let nodes: Vec<(f64, f64)> = (0..spec.nx)
        .flat_map(|i| (0..spec.ny).map(move |j| (i, j)))
        .map(|(i, j)| spec.node(i, j))
        .collect();
    let heights: Result<Vec<f64>, VerifyError> = nodes
        .par_iter()
        .map(|&(x, y)| {
            if options.polish {
                Ok(field.heights(x, y, &[(0.0, 0.0)])?[0])
            } else {
                Ok(field.initial(x, y)?.0)
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let mut patch = GraphPatch::from_samples(*spec, heights?)?;
    if options.polish {
        patch.analytic = Some(Arc::new(field));
    }
    Ok(patch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, Params};
    use crate::verify::{analytic_gauss_curvature, laplacian_residual};
    use crate::weierstrass::{sample_surface, Convention, Domain, SamplingOptions, WeierstrassData};

    fn grid(f: &str, g: &str, conv: Convention, domain: Domain, z0: Complex, p: f64) -> SurfaceGrid {
        let x0 = Vec3::new(z0.re, -z0.im, 0.0);
        let ps: Params = [("p".to_string(), p)].into_iter().collect();
        let d = WeierstrassData::new(parse_expr(f, &["p"]).unwrap(), parse_expr(g, &["p"]).unwrap(), conv, ps).unwrap();
        sample_surface(&d.phi(), &domain, z0, x0, 0.0, &SamplingOptions::default()).unwrap()
    }

    #[test]
    fn plane_resamples_to_zero() {
        let d = Domain::rect((-1.0, 1.0), (-1.0, 1.0), 9, 9).unwrap();
        let s = grid("1", "0", Convention::MinimalNormal, d, Complex::new(0.0, 0.0), 1.0);
        let spec = GridSpec::new((-0.9, 0.9), (-0.9, 0.9), 7, 7).unwrap();
        for polish in [false, true] {
            let g = to_normal_form(&s, &spec, &NormalFormOptions { polish }).unwrap();
            assert!(g.heights.iter().all(|h| h.abs() < 1e-15));
        }
    }

    #[test]
    fn hyperbolic_paraboloid_heights() {
        let p = 0.8;
        let d = Domain::rect((-1.0, 1.0), (-1.0, 1.0), 17, 17).unwrap();
        let s = grid("1", "-z/p", Convention::MinimalNormal, d, Complex::new(0.0, 0.0), p);
        let spec = GridSpec::new((-0.8, 0.8), (-0.8, 0.8), 9, 9).unwrap();
        let coarse = to_normal_form(&s, &spec, &NormalFormOptions { polish: false }).unwrap();
        let fine = to_normal_form(&s, &spec, &NormalFormOptions::default()).unwrap();
        let h: f64 = 2.0 / 16.0;
        for i in 0..9 {
            for j in 0..9 {
                let (x, y) = spec.node(i, j);
                let want = (x * x - y * y) / (2.0 * p);
                assert!((coarse.at(i, j) - want).abs() < h * h / p);
                assert!((fine.at(i, j) - want).abs() < 1e-14);
            }
        }
        assert!(laplacian_residual(&fine.grid_only()).unwrap() < 1e-10);
    }

    #[test]
    fn logarithmoid_heights_and_curvature() {
        let p = 1.1;
        let d = Domain::annulus((0.5, 2.0), (0.0, std::f64::consts::TAU), 32, 64).unwrap();
        let s = grid("1", "-z/p", Convention::ParabolicNormal, d, Complex::new(1.0, 0.0), p);
        let spec = GridSpec::new((0.7, 1.3), (-0.4, 0.4), 7, 9).unwrap();
        let g = to_normal_form(&s, &spec, &NormalFormOptions::default()).unwrap();
        for i in 0..7 {
            for j in 0..9 {
                let (x, y) = spec.node(i, j);
                assert!((g.at(i, j) - p * x.hypot(y).ln()).abs() < 1e-13);
            }
        }
        let r: f64 = 1.0;
        let k = analytic_gauss_curvature(&g, r, 0.0).unwrap();
        assert!((k + p * p / r.powi(4)).abs() < 1e-6, "{k}");
        let z = g.analytic().unwrap().parameter_at(1.0, 0.2).unwrap().unwrap();
        assert!((z - Complex::new(1.0, 0.2)).norm() < 1e-13);
    }

    #[test]
    fn outside_and_folded() {
        let d = Domain::rect((-1.0, 1.0), (-1.0, 1.0), 5, 5).unwrap();
        let s = grid("1", "0", Convention::MinimalNormal, d, Complex::new(0.0, 0.0), 1.0);
        let spec = GridSpec::new((0.0, 1.5), (0.0, 0.5), 3, 3).unwrap();
        assert!(matches!(
            to_normal_form(&s, &spec, &NormalFormOptions::default()),
            Err(VerifyError::OutsideImage { .. })
        ));
        // F = z² doubles angles: the top view folds over itself.
        let d = Domain::rect((-1.0, 1.0), (-1.0, 1.0), 6, 6).unwrap();
        let s = grid("z^2", "0", Convention::MinimalNormal, d, Complex::new(1.0, 1.0), 1.0);
        let spec = GridSpec::new((0.0, 0.1), (0.0, 0.1), 3, 3).unwrap();
        assert_eq!(to_normal_form(&s, &spec, &NormalFormOptions::default()).unwrap_err(), VerifyError::Folded);
    }
}
