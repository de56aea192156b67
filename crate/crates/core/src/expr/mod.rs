//! Holomorphic expressions of one complex variable: parsing, evaluation,
//! symbolic differentiation, and contour integration.

mod ast;
mod diff;
mod parse;
mod quadrature;

pub use ast::{EvalError, Expr, Func, Params, DEFAULT_POLE_CLEARANCE};
pub use parse::{parse_expr, validate_param_name, ParseError, RESERVED};
pub use quadrature::{
    contour_integrate, gauss_legendre_16, integrate_path, Path, PathKind, QuadratureError,
    QuadratureOptions, GAUSS_POINTS,
};
