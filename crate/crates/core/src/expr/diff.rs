use super::ast::{Expr, Func};

impl Expr {
    /// Symbolic derivative with respect to `z`.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param(_) => Expr::constant(0.0),
            Expr::Z => Expr::constant(1.0),
            Expr::Neg(a) => -a.differentiate(),
            Expr::Add(a, b) => a.differentiate() + b.differentiate(),
            Expr::Sub(a, b) => a.differentiate() - b.differentiate(),
            Expr::Mul(a, b) => {
                a.differentiate() * (**b).clone() + (**a).clone() * b.differentiate()
            }
            Expr::Div(a, b) => {
                let da = a.differentiate();
                let db = b.differentiate();
                if db.is_zero() {
                    da / (**b).clone()
                } else {
                    (da * (**b).clone() - (**a).clone() * db) / (**b).clone().powi(2)
                }
            }
            Expr::Pow(a, n) => {
                Expr::constant(*n as f64) * (**a).clone().powi(n - 1) * a.differentiate()
            }
            Expr::Call(func, a) => {
                let inner = (**a).clone();
                let outer = match func {
                    Func::Exp => inner.exp(),
                    Func::Ln => Expr::constant(1.0) / inner,
                    Func::Sin => inner.cos(),
                    Func::Cos => -inner.sin(),
                    Func::Sinh => inner.cosh(),
                    Func::Cosh => inner.sinh(),
                    Func::Sqrt => Expr::constant(0.5) / inner.sqrt(),
                };
                outer * a.differentiate()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse_expr, Params};
    use crate::Complex;

    fn check(src: &str, want: &str, z: Complex) {
        let ps: Params = [("p".to_string(), 1.7)].into_iter().collect();
        let d = parse_expr(src, &["p"]).unwrap().differentiate();
        let w = parse_expr(want, &["p"]).unwrap();
        let got = d.eval(z, &ps).unwrap();
        let exp = w.eval(z, &ps).unwrap();
        assert!((got - exp).norm() < 1e-13 * (1.0 + exp.norm()), "{src}: {got} vs {exp}");
    }

    #[test]
    fn linear() {
        check("-z/p", "-1/p", Complex::new(0.3, 0.4));
        let d = parse_expr("-z/p", &["p"]).unwrap().differentiate();
        assert!(d.is_constant_in_z());
    }

    #[test]
    fn reciprocal() {
        check("-1/z", "1/z^2", Complex::new(0.3, -1.4));
    }

    #[test]
    fn logarithm() {
        check("ln(z)", "1/z", Complex::new(-0.5, 0.8));
    }

    #[test]
    fn chain_rules() {
        let z = Complex::new(0.2, 0.9);
        check("sin(p*z)", "p*cos(p*z)", z);
        check("cosh(z^2)", "2*z*sinh(z^2)", z);
        check("sqrt(z)", "0.5/sqrt(z)", z);
        check("exp(-i*z)", "-i*exp(-i*z)", z);
        check("z^(-3)", "-3*z^(-4)", z);
        check("p", "0", z);
    }

    mod random {
        use crate::expr::{Expr, Func, Params};
        use crate::Complex;
        use proptest::prelude::*;

        fn leaf() -> impl Strategy<Value = Expr> {
            prop_oneof![
                Just(Expr::Z),
                (-2.0..2.0f64, -1.0..1.0f64).prop_map(|(a, b)| Expr::complex(Complex::new(a, b))),
            ]
        }

        fn expr() -> impl Strategy<Value = Expr> {
            leaf().prop_recursive(4, 24, 2, |inner| {
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
                    (inner.clone(), -3..=3i32).prop_map(|(a, n)| a.powi(n)),
                    (inner, proptest::sample::select(Func::ALL.to_vec())).prop_map(|(a, f)| Expr::call(f, a)),
                ]
            })
        }

        /// Value at `z`, or `None` near a pole, a branch cut or a zero of a log
        /// argument, or where the value is large.
        fn tame(e: &Expr, z: Complex) -> Option<Complex> {
            let far = |w: Complex| w.norm() > 0.05;
            let off_cut = |w: Complex| far(w) && !(w.re < 0.0 && w.im.abs() < 0.05);
            let v = match e {
                Expr::Const(c) => *c,
                Expr::Z => z,
                Expr::Param(_) => return None,
                Expr::Neg(a) => -tame(a, z)?,
                Expr::Add(a, b) => tame(a, z)? + tame(b, z)?,
                Expr::Sub(a, b) => tame(a, z)? - tame(b, z)?,
                Expr::Mul(a, b) => tame(a, z)? * tame(b, z)?,
                Expr::Div(a, b) => {
                    let d = tame(b, z)?;
                    if !far(d) {
                        return None;
                    }
                    tame(a, z)? / d
                }
                Expr::Pow(a, n) => {
                    let b = tame(a, z)?;
                    if *n < 0 && !far(b) {
                        return None;
                    }
                    b.powi(*n)
                }
                Expr::Call(f, a) => {
                    let w = tame(a, z)?;
                    if matches!(f, Func::Ln | Func::Sqrt) && !off_cut(w) {
                        return None;
                    }
                    e.eval(z, &Params::new()).ok()?
                }
            };
            (v.norm() < 1e3).then_some(v)
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 100, max_global_rejects: 100_000, ..ProptestConfig::default() })]

            #[test]
            fn derivative_matches_central_difference(
                e in expr(),
                r in 0.5..2.0f64,
                t in -3.0..3.0f64,
            ) {
                let z = Complex::from_polar(r, t);
                let h = 1e-5;
                let steps = [Complex::new(h, 0.0), Complex::new(0.0, h)];
                prop_assume!(tame(&e, z).is_some());
                prop_assume!(steps.iter().all(|&d| tame(&e, z + d).is_some() && tame(&e, z - d).is_some()));
                let ps = Params::new();
                let d = e.differentiate().eval(z, &ps);
                prop_assume!(d.is_ok());
                let d = d.unwrap();
                for step in steps {
                    let fd = (e.eval(z + step, &ps).unwrap() - e.eval(z - step, &ps).unwrap()) / (2.0 * step);
                    prop_assert!((d - fd).norm() <= 1e-6 * d.norm().max(1.0), "{e}: {d} vs {fd} at {z}");
                }
            }
        }
    }
}
