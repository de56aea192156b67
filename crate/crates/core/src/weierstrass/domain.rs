use std::f64::consts::TAU;

use super::WeierstrassError;
use crate::expr::Path;
use crate::Complex;

/// A structured parameter grid, stored row-major: sample `(i, j)` has index
/// `i·n₂ + j`, where `i` runs over the first parameter (`u` or `r`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `z = u + iv` on `[umin, umax] × [vmin, vmax]`.
    Rect {
        u: (f64, f64),
        v: (f64, f64),
        nu: usize,
        nv: usize,
    },
    /// `z = r e^{iφ}` on `[rmin, rmax] × [φmin, φmax]`, `rmin > 0`.
    Annulus {
        r: (f64, f64),
        phi: (f64, f64),
        nr: usize,
        nphi: usize,
    },
}

fn invalid<T>(m: impl Into<String>) -> Result<T, WeierstrassError> {
    Err(WeierstrassError::InvalidDomain(m.into()))
}

fn node(range: (f64, f64), n: usize, i: usize) -> f64 {
    if i + 1 == n {
        range.1
    } else {
        range.0 + (range.1 - range.0) * (i as f64 / (n - 1) as f64)
    }
}

fn within(x: f64, range: (f64, f64)) -> bool {
    let slack = 1e-12 * (range.1 - range.0).abs().max(1.0);
    x >= range.0 - slack && x <= range.1 + slack
}

impl Domain {
    pub fn rect(u: (f64, f64), v: (f64, f64), nu: usize, nv: usize) -> Result<Domain, WeierstrassError> {
        let d = Domain::Rect { u, v, nu, nv };
        d.validate()?;
        Ok(d)
    }

    pub fn annulus(r: (f64, f64), phi: (f64, f64), nr: usize, nphi: usize) -> Result<Domain, WeierstrassError> {
        let d = Domain::Annulus { r, phi, nr, nphi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), WeierstrassError> {
        let (a, b, n1, n2) = self.ranges();
        if ![a.0, a.1, b.0, b.1].iter().all(|x| x.is_finite()) {
            return invalid("non-finite bounds");
        }
        if n1 < 2 || n2 < 2 {
            return invalid("counts must be at least 2");
        }
        if !(a.0 < a.1 && b.0 < b.1) {
            return invalid("ranges must be increasing");
        }
        if let Domain::Annulus { r, phi, .. } = self {
            if r.0 <= 0.0 {
                return invalid("rmin must be positive");
            }
            if phi.1 - phi.0 > TAU + 1e-12 {
                return invalid("angular range exceeds one turn");
            }
        }
        Ok(())
    }

    fn ranges(&self) -> ((f64, f64), (f64, f64), usize, usize) {
        match *self {
            Domain::Rect { u, v, nu, nv } => (u, v, nu, nv),
            Domain::Annulus { r, phi, nr, nphi } => (r, phi, nr, nphi),
        }
    }

    /// `(n₁, n₂)`.
    pub fn shape(&self) -> (usize, usize) {
        let (_, _, n1, n2) = self.ranges();
        (n1, n2)
    }

    pub fn len(&self) -> usize {
        let (n1, n2) = self.shape();
        n1 * n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid parameters `(u, v)` or `(r, φ)` of sample `index`.
    pub fn params_at(&self, index: usize) -> (f64, f64) {
        let (a, b, n1, n2) = self.ranges();
        debug_assert!(index < n1 * n2);
        (node(a, n1, index / n2), node(b, n2, index % n2))
    }

    pub fn z_at(&self, index: usize) -> Complex {
        let (s, t) = self.params_at(index);
        match self {
            Domain::Rect { .. } => Complex::new(s, t),
            Domain::Annulus { .. } => Complex::from_polar(s, t),
        }
    }

    /// Parameters of `z0` in this domain; for annuli the angle is the representative
    /// inside the angular range.
    pub fn locate(&self, z0: Complex) -> Result<(f64, f64), WeierstrassError> {
        let outside = Err(WeierstrassError::BasePointOutside { z0 });
        match *self {
            Domain::Rect { u, v, .. } => {
                if within(z0.re, u) && within(z0.im, v) {
                    Ok((z0.re, z0.im))
                } else {
                    outside
                }
            }
            Domain::Annulus { r, phi, .. } => {
                let r0 = z0.norm();
                if !within(r0, r) {
                    return outside;
                }
                let mut a = z0.arg();
                let k = ((phi.0 - a) / TAU).ceil();
                a += k * TAU;
                if within(a, phi) {
                    Ok((r0, a))
                } else if within(a - TAU, phi) {
                    Ok((r0, a - TAU))
                } else {
                    outside
                }
            }
        }
    }

    /// The in-domain contour from `z0` to sample `index`, as consecutive pieces:
    /// horizontal then vertical for rectangles, radial then circular for annuli.
    /// Empty when the two points coincide.
    pub fn path_to(&self, z0: Complex, index: usize) -> Result<Vec<Path>, WeierstrassError> {
        let (s0, t0) = self.locate(z0)?;
        let (s, t) = self.params_at(index);
        let mut pieces = Vec::new();
        match self {
            Domain::Rect { .. } => {
                let corner = Complex::new(s, t0);
                if s != s0 {
                    pieces.push(Path::segment(z0, corner)?);
                }
                if t != t0 {
                    pieces.push(Path::segment(corner, Complex::new(s, t))?);
                }
            }
            Domain::Annulus { .. } => {
                if s != s0 {
                    pieces.push(Path::segment(z0, Complex::from_polar(s, t0))?);
                }
                if t != t0 {
                    pieces.push(Path::arc(Complex::new(0.0, 0.0), s, t0, t - t0)?);
                }
            }
        }
        Ok(pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let d = Domain::rect((0.0, 1.0), (-1.0, 1.0), 3, 5).unwrap();
        assert_eq!(d.len(), 15);
        assert_eq!(d.params_at(0), (0.0, -1.0));
        assert_eq!(d.params_at(4), (0.0, 1.0));
        assert_eq!(d.params_at(5), (0.5, -1.0));
        assert_eq!(d.params_at(14), (1.0, 1.0));
    }

    #[test]
    fn invalid_domains() {
        assert!(Domain::annulus((0.0, 1.0), (0.0, 1.0), 4, 4).is_err());
        assert!(Domain::rect((0.0, 1.0), (0.0, 1.0), 1, 4).is_err());
        assert!(Domain::rect((1.0, 0.0), (0.0, 1.0), 2, 4).is_err());
        assert!(Domain::annulus((0.5, 1.0), (0.0, 7.0), 4, 4).is_err());
    }

    #[test]
    fn annulus_angle_representative() {
        let d = Domain::annulus((0.5, 2.0), (0.0, TAU), 4, 8).unwrap();
        let (r, a) = d.locate(Complex::from_polar(1.0, -0.5)).unwrap();
        assert!((r - 1.0).abs() < 1e-15 && (a - (TAU - 0.5)).abs() < 1e-15);
        assert!(d.locate(Complex::new(0.1, 0.0)).is_err());
    }

    #[test]
    fn paths_end_at_samples() {
        let d = Domain::annulus((0.5, 2.0), (-1.0, 2.0), 4, 6).unwrap();
        let z0 = Complex::new(1.0, 0.0);
        for k in 0..d.len() {
            let pieces = d.path_to(z0, k).unwrap();
            let end = pieces.last().map(|p| p.end()).unwrap_or(z0);
            assert!((end - d.z_at(k)).norm() < 1e-14);
        }
        let r = Domain::rect((-1.0, 1.0), (-1.0, 1.0), 3, 3).unwrap();
        assert!(r.path_to(Complex::new(0.0, 0.0), 4).unwrap().is_empty());
    }
}
