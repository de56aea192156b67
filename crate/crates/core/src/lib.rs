//! Minimal surfaces in simply isotropic space.
//!
//! Simply isotropic space is R³ with the degenerate metric `⟨u,v⟩ = u¹v¹ + u²v²`;
//! the vertical direction `(0,0,1)` is isotropic. Minimal (`H = 0`) surfaces are
//! generated here from holomorphic Weierstrass data or from Björling data along a
//! curve, and checked against representation-free oracles on their normal form.
//!
//! - [`expr`]: holomorphic expressions, symbolic derivatives, contour integrals.
//! - [`isogeom`]: isotropic vector algebra, the parabolic unit sphere, its
//!   stereographic projections, and images of plane sections.
//! - [`weierstrass`]: complex curves from Weierstrass data, sampled surfaces,
//!   normals, fundamental forms, curvature, associate families.
//! - [`bjorling`]: the Cauchy problem along a prescribed curve.
//! - [`verify`]: graph (normal form) extraction and finite-difference checks.

pub mod bjorling;
pub mod expr;
pub mod isogeom;
pub mod verify;
pub mod weierstrass;

pub use num_complex::Complex64 as Complex;
