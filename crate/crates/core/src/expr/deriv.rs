//! Symbolic differentiation with light simplification.

use thiserror::Error;

use super::{BinOp, Expr, Func};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DiffError {
    /// `abs` has no derivative at 0; expressions containing it are rejected
    /// rather than differentiated piecewise.
    #[error("abs(...) is not differentiable")]
    NonDifferentiable,
}

pub fn contains_abs(e: &Expr) -> bool {
    match e {
        Expr::Number(_) | Expr::Var => false,
        Expr::Neg(inner) => contains_abs(inner),
        Expr::Binary { lhs, rhs, .. } => contains_abs(lhs) || contains_abs(rhs),
        Expr::Call { func, arg } => *func == Func::Abs || contains_abs(arg),
    }
}

/// True when the expression contains `a^b` with a non-literal exponent. Such
/// powers are rewritten as `exp(b*log(a))` during differentiation, which
/// narrows the domain to `a > 0`.
pub fn contains_nonliteral_pow(e: &Expr) -> bool {
    match e {
        Expr::Number(_) | Expr::Var => false,
        Expr::Neg(inner) => contains_nonliteral_pow(inner),
        Expr::Binary { op, lhs, rhs } => {
            (*op == BinOp::Pow && !matches!(**rhs, Expr::Number(_)))
                || contains_nonliteral_pow(lhs)
                || contains_nonliteral_pow(rhs)
        }
        Expr::Call { arg, .. } => contains_nonliteral_pow(arg),
    }
}

/// Symbolic derivative with constant folding and identity elimination.
/// Applying it twice yields the second derivative.
pub fn differentiate(e: &Expr) -> Result<Expr, DiffError> {
    Ok(simplify(d(e)?))
}

fn d(e: &Expr) -> Result<Expr, DiffError> {
    use BinOp::*;
    Ok(match e {
        Expr::Number(_) => Expr::Number(0.0),
        Expr::Var => Expr::Number(1.0),
        Expr::Neg(inner) => Expr::Neg(Box::new(d(inner)?)),
        Expr::Binary { op, lhs, rhs } => match op {
            Add => Expr::binary(Add, d(lhs)?, d(rhs)?),
            Sub => Expr::binary(Sub, d(lhs)?, d(rhs)?),
            Mul => Expr::binary(
                Add,
                Expr::binary(Mul, d(lhs)?, (**rhs).clone()),
                Expr::binary(Mul, (**lhs).clone(), d(rhs)?),
            ),
            Div => Expr::binary(
                Div,
                Expr::binary(
                    Sub,
                    Expr::binary(Mul, d(lhs)?, (**rhs).clone()),
                    Expr::binary(Mul, (**lhs).clone(), d(rhs)?),
                ),
                Expr::binary(Pow, (**rhs).clone(), Expr::Number(2.0)),
            ),
            Pow => {
                if let Expr::Number(n) = **rhs {
                    // n * b^(n-1) * b'
                    Expr::binary(
                        Mul,
                        Expr::binary(
                            Mul,
                            Expr::Number(n),
                            Expr::binary(Pow, (**lhs).clone(), Expr::Number(n - 1.0)),
                        ),
                        d(lhs)?,
                    )
                } else {
                    // rewrite a^b as exp(b*log(a)); valid for a > 0
                    let rewritten = Expr::call(
                        Func::Exp,
                        Expr::binary(Mul, (**rhs).clone(), Expr::call(Func::Log, (**lhs).clone())),
                    );
                    d(&rewritten)?
                }
            }
        },
        Expr::Call { func, arg } => {
            let inner = d(arg)?;
            let outer = match func {
                Func::Sin => Expr::call(Func::Cos, (**arg).clone()),
                Func::Cos => Expr::Neg(Box::new(Expr::call(Func::Sin, (**arg).clone()))),
                Func::Tan => Expr::binary(
                    Div,
                    Expr::Number(1.0),
                    Expr::binary(
                        Pow,
                        Expr::call(Func::Cos, (**arg).clone()),
                        Expr::Number(2.0),
                    ),
                ),
                Func::Exp => Expr::call(Func::Exp, (**arg).clone()),
                Func::Log => Expr::binary(Div, Expr::Number(1.0), (**arg).clone()),
                Func::Sqrt => Expr::binary(
                    Div,
                    Expr::Number(1.0),
                    Expr::binary(
                        Mul,
                        Expr::Number(2.0),
                        Expr::call(Func::Sqrt, (**arg).clone()),
                    ),
                ),
                Func::Abs => return Err(DiffError::NonDifferentiable),
            };
            Expr::binary(Mul, outer, inner)
        }
    })
}

/// Constant folding plus identity elimination (`0*e -> 0`, `e+0 -> e`,
/// `e*1 -> e` and the obvious mirror cases). Nothing deeper.
pub fn simplify(e: Expr) -> Expr {
    match e {
        Expr::Number(_) | Expr::Var => e,
        Expr::Neg(inner) => match simplify(*inner) {
            Expr::Number(v) => Expr::Number(-v),
            Expr::Neg(twice) => *twice,
            other => Expr::Neg(Box::new(other)),
        },
        Expr::Binary { op, lhs, rhs } => {
            let l = simplify(*lhs);
            let r = simplify(*rhs);
            if let (Expr::Number(a), Expr::Number(b)) = (&l, &r) {
                let folded = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(*b),
                };
                if folded.is_finite() {
                    return Expr::Number(folded);
                }
            }
            match (op, &l, &r) {
                (BinOp::Add, Expr::Number(z), _) if *z == 0.0 => r,
                (BinOp::Add, _, Expr::Number(z)) if *z == 0.0 => l,
                (BinOp::Sub, _, Expr::Number(z)) if *z == 0.0 => l,
                (BinOp::Sub, Expr::Number(z), _) if *z == 0.0 => simplify(Expr::Neg(Box::new(r))),
                (BinOp::Mul, Expr::Number(z), _) if *z == 0.0 => Expr::Number(0.0),
                (BinOp::Mul, _, Expr::Number(z)) if *z == 0.0 => Expr::Number(0.0),
                (BinOp::Mul, Expr::Number(one), _) if *one == 1.0 => r,
                (BinOp::Mul, _, Expr::Number(one)) if *one == 1.0 => l,
                (BinOp::Div, _, Expr::Number(one)) if *one == 1.0 => l,
                (BinOp::Pow, _, Expr::Number(one)) if *one == 1.0 => l,
                (BinOp::Pow, _, Expr::Number(z)) if *z == 0.0 => Expr::Number(1.0),
                _ => Expr::binary(op, l, r),
            }
        }
        Expr::Call { func, arg } => Expr::call(func, simplify(*arg)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn second_derivative(src: &str) -> Expr {
        let first = differentiate(&parse(src).unwrap()).unwrap();
        differentiate(&first).unwrap()
    }

    #[test]
    fn polynomial_derivative_folds() {
        let d = differentiate(&parse("x^2 - 2").unwrap()).unwrap();
        assert_eq!(d.to_string(), "2*x");
    }

    #[test]
    fn cosine_derivative() {
        let d = differentiate(&parse("cos(x)").unwrap()).unwrap();
        assert_eq!(d.to_string(), "-sin(x)");
    }

    #[test]
    fn second_derivative_of_exp_decay_matches_central_difference() {
        // d2/dx2 of exp(-x) - 1 is exp(-x); cross-check numerically
        let d2 = second_derivative("exp(-x) - 1");
        let f = parse("exp(-x) - 1").unwrap();
        let step = 1e-4;
        for i in 0..100 {
            let x = -2.0 + 4.0 * (i as f64 + 0.5) / 100.0;
            let fd = (f.eval(x + step).unwrap() - 2.0 * f.eval(x).unwrap()
                + f.eval(x - step).unwrap())
                / (step * step);
            let sym = d2.eval(x).unwrap();
            assert!(
                (sym - fd).abs() <= 1e-5 * sym.abs().max(1.0),
                "x = {x}: symbolic {sym} vs central {fd}"
            );
            assert!((sym - (-x).exp()).abs() <= 1e-12 * (-x).exp());
        }
    }

    #[test]
    fn abs_is_rejected() {
        assert_eq!(
            differentiate(&parse("abs(x)").unwrap()),
            Err(DiffError::NonDifferentiable)
        );
        assert!(contains_abs(&parse("1 + abs(x - 2)").unwrap()));
        assert!(!contains_abs(&parse("x^2").unwrap()));
    }

    #[test]
    fn nonliteral_pow_is_rewritten_via_exp_log() {
        let e = parse("x^x").unwrap();
        assert!(contains_nonliteral_pow(&e));
        assert!(!contains_nonliteral_pow(&parse("x^3").unwrap()));
        let d = differentiate(&e).unwrap();
        // d/dx x^x = x^x (log x + 1); check at x = 2
        let expected = 4.0 * (2f64.ln() + 1.0);
        assert!((d.eval(2.0).unwrap() - expected).abs() < 1e-12);
        // the rewrite narrows the domain: the derivative needs log(x)
        assert!(d.eval(-1.0).is_err());
    }

    #[test]
    fn quotient_and_chain_rules() {
        let d = differentiate(&parse("sin(x)/x").unwrap()).unwrap();
        let x = 1.3_f64;
        let expected = (x * x.cos() - x.sin()) / (x * x);
        assert!((d.eval(x).unwrap() - expected).abs() < 1e-14);

        let d = differentiate(&parse("sqrt(1 + x^2)").unwrap()).unwrap();
        let expected = x / (1.0 + x * x).sqrt();
        assert!((d.eval(x).unwrap() - expected).abs() < 1e-14);
    }
}
