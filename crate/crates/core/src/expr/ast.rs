use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::Complex;

/// Named real parameters bound at evaluation time.
pub type Params = BTreeMap<String, f64>;

/// Smallest accepted `|denominator|` (and `|argument|` of `ln`) during evaluation.
pub const DEFAULT_POLE_CLEARANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// A holomorphic expression in the complex variable `z` with named real parameters.
///
/// Powers take integer exponents only; a general power `w^a` has to be spelled
/// `exp(a*ln(w))`, which makes the branch choice explicit. `ln` and `sqrt` use the
/// principal branch with the cut on the negative real axis.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex),
    Z,
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("pole: |denominator| = {magnitude:.3e} at z = {z}")]
    Pole { z: Complex, magnitude: f64 },
    #[error("logarithm of zero at z = {z}")]
    LogOfZero { z: Complex },
    #[error("non-finite value at z = {z}")]
    NonFinite { z: Complex },
    #[error("non-finite input z = {z}")]
    NonFiniteInput { z: Complex },
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(Complex::new(value, 0.0))
    }

    pub fn complex(value: Complex) -> Expr {
        Expr::Const(value)
    }

    pub fn i() -> Expr {
        Expr::Const(Complex::i())
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        match arg {
            Expr::Const(c) => match apply_func(func, c) {
                Some(v) if v.re.is_finite() && v.im.is_finite() => Expr::Const(v),
                _ => Expr::Call(func, Box::new(Expr::Const(c))),
            },
            other => Expr::Call(func, Box::new(other)),
        }
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn ln(self) -> Expr {
        Expr::call(Func::Ln, self)
    }

    pub fn sin(self) -> Expr {
        Expr::call(Func::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::call(Func::Cos, self)
    }

    pub fn sinh(self) -> Expr {
        Expr::call(Func::Sinh, self)
    }

    pub fn cosh(self) -> Expr {
        Expr::call(Func::Cosh, self)
    }

    pub fn sqrt(self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    pub fn powi(self, n: i32) -> Expr {
        match (self, n) {
            (_, 0) => Expr::constant(1.0),
            (e, 1) => e,
            (Expr::Const(c), n) if c != Complex::new(0.0, 0.0) || n > 0 => Expr::Const(c.powi(n)),
            (Expr::Pow(base, m), n) if m.checked_mul(n).is_some() => base.powi(m * n),
            (e, n) => Expr::Pow(Box::new(e), n),
        }
    }

    pub fn as_const(&self) -> Option<Complex> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(Complex::new(1.0, 0.0))
    }

    /// Names of all parameters referenced by the expression.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Param(name) = e {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        });
        out.sort();
        out
    }

    /// True when the expression does not reference `z`.
    pub fn is_constant_in_z(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Z));
        !found
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Z | Expr::Param(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Substitutes parameter values and folds constant subtrees.
    pub fn bind(&self, params: &Params) -> Result<Expr, EvalError> {
        Ok(match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Z => Expr::Z,
            Expr::Param(name) => match params.get(name) {
                Some(v) => Expr::constant(*v),
                None => return Err(EvalError::UnboundParameter(name.clone())),
            },
            Expr::Neg(a) => -a.bind(params)?,
            Expr::Add(a, b) => a.bind(params)? + b.bind(params)?,
            Expr::Sub(a, b) => a.bind(params)? - b.bind(params)?,
            Expr::Mul(a, b) => a.bind(params)? * b.bind(params)?,
            Expr::Div(a, b) => a.bind(params)? / b.bind(params)?,
            Expr::Pow(a, n) => a.bind(params)?.powi(*n),
            Expr::Call(func, a) => Expr::call(*func, a.bind(params)?),
        })
    }

    /// Replaces every occurrence of `z` by `inner`.
    pub fn compose(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Z => inner.clone(),
            Expr::Param(name) => Expr::Param(name.clone()),
            Expr::Neg(a) => -a.compose(inner),
            Expr::Add(a, b) => a.compose(inner) + b.compose(inner),
            Expr::Sub(a, b) => a.compose(inner) - b.compose(inner),
            Expr::Mul(a, b) => a.compose(inner) * b.compose(inner),
            Expr::Div(a, b) => a.compose(inner) / b.compose(inner),
            Expr::Pow(a, n) => a.compose(inner).powi(*n),
            Expr::Call(func, a) => Expr::call(*func, a.compose(inner)),
        }
    }

    pub fn eval(&self, z: Complex, params: &Params) -> Result<Complex, EvalError> {
        self.eval_with(z, params, DEFAULT_POLE_CLEARANCE)
    }

    /// Evaluates on the principal branch; `clearance` is the smallest accepted
    /// magnitude of a denominator or of a logarithm's argument.
    pub fn eval_with(
        &self,
        z: Complex,
        params: &Params,
        clearance: f64,
    ) -> Result<Complex, EvalError> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(EvalError::NonFiniteInput { z });
        }
        let v = self.eval_inner(z, params, clearance)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { z })
        }
    }

    fn eval_inner(&self, z: Complex, params: &Params, clearance: f64) -> Result<Complex, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Z => z,
            Expr::Param(name) => match params.get(name) {
                Some(v) => Complex::new(*v, 0.0),
                None => return Err(EvalError::UnboundParameter(name.clone())),
            },
            Expr::Neg(a) => -a.eval_inner(z, params, clearance)?,
            Expr::Add(a, b) => a.eval_inner(z, params, clearance)? + b.eval_inner(z, params, clearance)?,
            Expr::Sub(a, b) => a.eval_inner(z, params, clearance)? - b.eval_inner(z, params, clearance)?,
            Expr::Mul(a, b) => a.eval_inner(z, params, clearance)? * b.eval_inner(z, params, clearance)?,
            Expr::Div(a, b) => {
                let num = a.eval_inner(z, params, clearance)?;
                let den = b.eval_inner(z, params, clearance)?;
                let magnitude = den.norm();
                if magnitude < clearance {
                    return Err(EvalError::Pole { z, magnitude });
                }
                num / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval_inner(z, params, clearance)?;
                if *n < 0 {
                    let magnitude = base.norm();
                    if magnitude < clearance {
                        return Err(EvalError::Pole { z, magnitude });
                    }
                }
                base.powi(*n)
            }
            Expr::Call(func, a) => {
                let arg = a.eval_inner(z, params, clearance)?;
                if *func == Func::Ln && arg.norm() < clearance {
                    return Err(EvalError::LogOfZero { z });
                }
                apply_func(*func, arg).ok_or(EvalError::NonFinite { z })?
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn principal_ln(w: Complex) -> Complex {
    // arg in (-pi, pi]: the lower lip of the cut maps to +pi.
    let w = if w.im == 0.0 { Complex::new(w.re, 0.0) } else { w };
    w.ln()
}

fn principal_sqrt(w: Complex) -> Complex {
    let w = if w.im == 0.0 { Complex::new(w.re, 0.0) } else { w };
    w.sqrt()
}

pub(crate) fn apply_func(func: Func, w: Complex) -> Option<Complex> {
    let v = match func {
        Func::Exp => w.exp(),
        Func::Ln => {
            if w.norm() == 0.0 {
                return None;
            }
            principal_ln(w)
        }
        Func::Sin => w.sin(),
        Func::Cos => w.cos(),
        Func::Sinh => w.sinh(),
        Func::Cosh => w.cosh(),
        Func::Sqrt => principal_sqrt(w),
    };
    Some(v)
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(a) => *a,
            e => Expr::Neg(Box::new(e)),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a + b),
            (a, b) if a.is_zero() => b,
            (a, b) if b.is_zero() => a,
            (a, Expr::Neg(b)) => Expr::Sub(Box::new(a), b),
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a - b),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => -b,
            (a, Expr::Neg(b)) => Expr::Add(Box::new(a), b),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a * b),
            (a, _) if a.is_zero() => Expr::constant(0.0),
            (_, b) if b.is_zero() => Expr::constant(0.0),
            (a, b) if a.is_one() => b,
            (a, b) if b.is_one() => a,
            (Expr::Const(c), b) if c == Complex::new(-1.0, 0.0) => -b,
            (a, Expr::Const(c)) if c == Complex::new(-1.0, 0.0) => -a,
            (Expr::Neg(a), Expr::Neg(b)) => *a * *b,
            (Expr::Neg(a), b) => -(*a * b),
            (a, Expr::Neg(b)) => -(a * *b),
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) if b.norm() != 0.0 => Expr::Const(a / b),
            (a, _) if a.is_zero() => Expr::constant(0.0),
            (a, b) if b.is_one() => a,
            (Expr::Neg(a), b) => -(*a / b),
            (a, Expr::Neg(b)) => -(a / *b),
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Expr {
        Expr::constant(v)
    }
}

impl From<Complex> for Expr {
    fn from(v: Complex) -> Expr {
        Expr::Const(v)
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v == std::f64::consts::PI {
        write!(f, "pi")
    } else {
        // `{:?}` is the shortest representation that parses back to the same bits.
        write!(f, "{v:?}")
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Complex) -> fmt::Result {
    match (c.re, c.im) {
        (re, im) if im == 0.0 => {
            if re.is_sign_negative() {
                write!(f, "(-")?;
                write_real(f, -re)?;
                write!(f, ")")
            } else {
                write_real(f, re)
            }
        }
        (re, im) if re == 0.0 && !re.is_sign_negative() => {
            write!(f, "(")?;
            if im.is_sign_negative() {
                write!(f, "-")?;
            }
            write_real(f, im.abs())?;
            write!(f, "*i)")
        }
        (re, im) => {
            write!(f, "(")?;
            if re.is_sign_negative() {
                write!(f, "-")?;
            }
            write_real(f, re.abs())?;
            write!(f, "{}", if im.is_sign_negative() { "-" } else { "+" })?;
            write_real(f, im.abs())?;
            write!(f, "*i)")
        }
    }
}

struct Child<'a> {
    expr: &'a Expr,
    min: u8,
}

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.precedence() < self.min {
            write!(f, "({})", self.expr)
        } else {
            write!(f, "{}", self.expr)
        }
    }
}

/// Prints in the grammar accepted by [`crate::expr::parse_expr`]; parsing the
/// printed text gives back a tree that evaluates identically.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |expr, min| Child { expr, min };
        match self {
            Expr::Const(c) => write_const(f, *c),
            Expr::Z => write!(f, "z"),
            Expr::Param(name) => write!(f, "{name}"),
            Expr::Neg(a) => write!(f, "-{}", child(a, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", child(a, 1), child(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", child(a, 1), child(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", child(a, 2), child(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", child(a, 2), child(b, 3)),
            Expr::Pow(a, n) => {
                if *n < 0 {
                    write!(f, "{}^({n})", child(a, 5))
                } else {
                    write!(f, "{}^{n}", child(a, 5))
                }
            }
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}
