//! Vector algebra of simply isotropic space, the parabolic unit sphere
//! `Σ² : z = ½ − ½(x² + y²)` and its stereographic projections.
//!
//! Following the usual convention for spheres of parabolic type, the "center" of
//! `Σ²` is its focus, the origin. The north pole is `N = (0, 0, ½)`; the south pole
//! sits at infinity and corresponds to `w = 0` under the projection.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The isotropic direction `(0, 0, 1)`, annihilated by the metric.
pub const ISOTROPIC: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

/// North pole of the parabolic unit sphere.
pub const NORTH_POLE: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.5 };

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3 { x, y, z }
    }

    /// Euclidean dot product.
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        cross(self, other)
    }

    /// Projection onto the xy-plane, `(x, y, 0)`.
    pub fn top_view(self) -> Vec3 {
        Vec3::new(self.x, self.y, 0.0)
    }

    /// Top view read as a complex number `x + iy`.
    pub fn top_view_complex(self) -> Complex {
        Complex::new(self.x, self.y)
    }

    pub fn euclidean_norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Isotropic semi-norm `√⟨u,u⟩`.
    pub fn iso_norm(self) -> f64 {
        iso_dot(self, self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn max_abs_diff(self, other: Vec3) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Vec3 {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A point of four-dimensional (Minkowski) space, used by the stationary family.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Vec4 {
        Vec4([x1, x2, x3, x4])
    }
}

/// The isotropic metric `⟨u,v⟩ = u¹v¹ + u²v²`.
pub fn iso_dot(u: Vec3, v: Vec3) -> f64 {
    u.x * v.x + u.y * v.y
}

/// The secondary metric on isotropic vectors, `⟪u,v⟫ = u³v³`.
pub fn secondary_dot(u: Vec3, v: Vec3) -> f64 {
    u.z * v.z
}

/// Euclidean cross product.
pub fn cross(u: Vec3, v: Vec3) -> Vec3 {
    Vec3::new(
        u.y * v.z - u.z * v.y,
        -u.x * v.z + u.z * v.x,
        u.x * v.y - u.y * v.x,
    )
}

/// Height of `Σ²` above the top-view point `(x, y)`.
pub fn parabolic_sphere_height(x: f64, y: f64) -> f64 {
    0.5 - 0.5 * (x * x + y * y)
}

pub fn on_parabolic_sphere(p: Vec3, tol: f64) -> bool {
    (p.z - parabolic_sphere_height(p.x, p.y)).abs() <= tol
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("the north pole has no stereographic image")]
    NorthPole,
    #[error("point {point} is not on the parabolic unit sphere (residual {residual:.3e})")]
    OffSphere { point: Vec3, residual: f64 },
    #[error("w = 0 corresponds to the south pole at infinity")]
    SouthPole,
    #[error("point on the axis x = y = 0 has no image under the radius-{radius} projection")]
    AxisPoint { radius: f64 },
    #[error("point at height z = R/2 = {0} projects to infinity")]
    CenterPlane(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid sphere radius {0}")]
    InvalidRadius(f64),
}

/// Tolerance used by [`project_parabolic`] to accept a point as lying on `Σ²`,
/// relative to `max(1, x² + y²)`.
pub const SPHERE_TOLERANCE: f64 = 1e-9;

/// Parabolic stereographic projection `π : Σ² \ {N} → ℂ*`,
/// `π(p) = (p₁, p₂) / (p₁² + p₂²)`.
pub fn project_parabolic(p: Vec3) -> Result<Complex, ProjectionError> {
    if !p.is_finite() {
        return Err(ProjectionError::NonFinite);
    }
    let rho2 = p.x * p.x + p.y * p.y;
    let residual = (p.z - parabolic_sphere_height(p.x, p.y)).abs();
    if residual > SPHERE_TOLERANCE * rho2.max(1.0) {
        return Err(ProjectionError::OffSphere { point: p, residual });
    }
    if rho2 <= 1e-300 {
        return Err(ProjectionError::NorthPole);
    }
    Ok(Complex::new(p.x / rho2, p.y / rho2))
}

/// Inverse of [`project_parabolic`].
pub fn unproject_parabolic(w: Complex) -> Result<Vec3, ProjectionError> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(ProjectionError::NonFinite);
    }
    let rho2 = w.norm_sqr();
    if rho2 == 0.0 {
        return Err(ProjectionError::SouthPole);
    }
    Ok(Vec3::new(w.re / rho2, w.im / rho2, 0.5 - 0.5 / rho2))
}

/// Radius of a sphere of parabolic type `Σ²_R : z = R/2 − (x² + y²)/(2R)`.
/// `Infinite` stands for the plane `z = 1`, whose projection is the top view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphereRadius {
    Finite(f64),
    Infinite,
}

/// Stereographic projection of `Σ²_R` from its north pole `(0, 0, R/2)` onto the
/// xy-plane.
///
/// For finite `R` this is the central projection `p̃ / (1 − 2p₃/R)`, which equals
/// `R² p̃ / |p̃|²` for points of `Σ²_R` and tends to the top view `p̃` as `R → ∞`
/// with `p` held fixed.
pub fn project_radius(p: Vec3, radius: SphereRadius) -> Result<Complex, ProjectionError> {
    if !p.is_finite() {
        return Err(ProjectionError::NonFinite);
    }
    match radius {
        SphereRadius::Infinite => Ok(Complex::new(p.x, p.y)),
        SphereRadius::Finite(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(ProjectionError::InvalidRadius(r));
            }
            if p.x == 0.0 && p.y == 0.0 {
                return Err(ProjectionError::AxisPoint { radius: r });
            }
            let scale = 1.0 - 2.0 * p.z / r;
            if scale == 0.0 {
                return Err(ProjectionError::CenterPlane(r / 2.0));
            }
            Ok(Complex::new(p.x / scale, p.y / scale))
        }
    }
}

/// The plane `Ax + By + Cz + D = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneSection {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PlaneSection {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> PlaneSection {
        PlaneSection { a, b, c, d }
    }

    pub fn contains(&self, p: Vec3) -> f64 {
        self.a * p.x + self.b * p.y + self.c * p.z + self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionKind {
    LineThroughOrigin,
    Line,
    Circle,
    Point,
    Empty,
}

impl SectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionKind::LineThroughOrigin => "line_through_origin",
            SectionKind::Line => "line",
            SectionKind::Circle => "circle",
            SectionKind::Point => "point",
            SectionKind::Empty => "empty",
        }
    }
}

/// Image in ℂ of `Σ² ∩ plane` under [`project_parabolic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionShape {
    /// The line `A·X + B·Y = offset` (offset 0 for lines through the origin; the
    /// origin itself is never attained).
    Line { a: f64, b: f64, offset: f64 },
    Circle { center: Complex, radius: f64 },
    /// Tangent plane: the section is a single point with this image.
    Point(Complex),
    /// The section is empty or consists of the north pole only.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionImage {
    pub shape: SectionShape,
    /// The section is an r-geodesic (plane through the center, `D = 0`).
    pub is_r_geodesic: bool,
}

impl SectionImage {
    pub fn kind(&self) -> SectionKind {
        match self.shape {
            SectionShape::Line { offset, .. } if offset == 0.0 => SectionKind::LineThroughOrigin,
            SectionShape::Line { .. } => SectionKind::Line,
            SectionShape::Circle { .. } => SectionKind::Circle,
            SectionShape::Point(_) => SectionKind::Point,
            SectionShape::Empty => SectionKind::Empty,
        }
    }

    /// Signed distance-like residual of `w` against the image curve: zero on it.
    pub fn residual(&self, w: Complex) -> Option<f64> {
        match self.shape {
            SectionShape::Line { a, b, offset } => {
                Some((a * w.re + b * w.im - offset) / (a * a + b * b).sqrt())
            }
            SectionShape::Circle { center, radius } => Some((w - center).norm() - radius),
            SectionShape::Point(p) => Some((w - p).norm()),
            SectionShape::Empty => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SectionError {
    #[error("plane normal (A, B, C) must be nonzero")]
    ZeroNormal,
    #[error("non-finite plane coefficients")]
    NonFinite,
}

/// Absolute tolerance on the coefficient combinations `C`, `D`, `C + 2D` and on
/// the radius expression.
pub const SECTION_TOLERANCE: f64 = 1e-12;

/// Classifies the stereographic image of the plane section `Σ² ∩ {Ax+By+Cz+D=0}`.
///
/// Substituting `Σ²` into the plane gives `2Ax + 2By + C(1 − x² − y²) + 2D = 0`,
/// and with `(X, Y) = π(x, y, z)`, `X² + Y² = 1/(x² + y²)`:
/// `(C + 2D)(X² + Y²) + 2AX + 2BY = C`.
/// The north pole lies on the plane iff `C + 2D = 0`, in which case the image is
/// the line `AX + BY = C`. Otherwise it is the circle with center
/// `−(A, B)/(C + 2D)` and radius² `(A² + B² + C(C + 2D))/(C + 2D)²`, degenerating
/// to a point when that numerator vanishes and to nothing when it is negative.
pub fn classify_plane_section(s: PlaneSection) -> Result<SectionImage, SectionError> {
    let PlaneSection { a, b, c, d } = s;
    if ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(SectionError::NonFinite);
    }
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(SectionError::ZeroNormal);
    }
    let tol = SECTION_TOLERANCE;
    let is_r_geodesic = d.abs() <= tol;
    let denom = c + 2.0 * d;
    let ab2 = a * a + b * b;
    let numerator = ab2 + c * denom;
    let shape = if denom.abs() <= tol {
        if ab2 <= tol {
            // The plane z = 1/2 touches Σ² only at N.
            SectionShape::Empty
        } else {
            SectionShape::Line {
                a,
                b,
                offset: if c.abs() <= tol { 0.0 } else { c },
            }
        }
    } else if numerator.abs() <= tol {
        SectionShape::Point(Complex::new(-a / denom, -b / denom))
    } else if numerator < 0.0 {
        SectionShape::Empty
    } else {
        SectionShape::Circle {
            center: Complex::new(-a / denom, -b / denom),
            radius: numerator.sqrt() / denom.abs(),
        }
    };
    Ok(SectionImage { shape, is_r_geodesic })
}
