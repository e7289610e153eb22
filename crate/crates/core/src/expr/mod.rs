//! Parser, evaluator, and symbolic differentiator for single-variable
//! arithmetic expressions.
//!
//! Grammar (whitespace insignificant between tokens):
//!
//! ```text
//! expr    := term (('+'|'-') term)* ;
//! term    := factor (('*'|'/') factor)* ;
//! factor  := '-' factor | power ;
//! power   := atom ('^' factor)? ;
//! atom    := NUMBER | 'x' | IDENT '(' expr ')' | '(' expr ')' ;
//! NUMBER  := decimal literal with optional fraction and exponent ;
//! IDENT   := one of sin cos tan exp log sqrt abs ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus. There are no
//! named constants: write `3.141592653589793`, not `pi`.

mod deriv;
mod parse;

pub use deriv::{contains_abs, contains_nonliteral_pow, differentiate, simplify, DiffError};
pub use parse::{parse, ParseError};

use std::fmt;

use thiserror::Error;

use crate::error::Error;
use crate::function::{Interval, RealFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Parsed arithmetic expression in the single variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var,
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

/// Domain violations surface as errors naming the offending node; evaluation
/// never returns NaN or an infinity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprEvalError {
    #[error("division by zero in \"{node}\" at x = {x}")]
    DivisionByZero { node: String, x: f64 },
    #[error("log of non-positive argument {arg} in \"{node}\" at x = {x}")]
    LogNonPositive { node: String, arg: f64, x: f64 },
    #[error("sqrt of negative argument {arg} in \"{node}\" at x = {x}")]
    SqrtNegative { node: String, arg: f64, x: f64 },
    #[error("non-finite result in \"{node}\" at x = {x}")]
    NonFinite { node: String, x: f64 },
}

impl Expr {
    pub fn number(v: f64) -> Expr {
        Expr::Number(v)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call {
            func,
            arg: Box::new(arg),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, ExprEvalError> {
        let value = match self {
            Expr::Number(c) => *c,
            Expr::Var => x,
            Expr::Neg(inner) => -inner.eval(x)?,
            Expr::Binary { op, lhs, rhs } => {
                let l = lhs.eval(x)?;
                let r = rhs.eval(x)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(ExprEvalError::DivisionByZero {
                                node: self.to_string(),
                                x,
                            });
                        }
                        l / r
                    }
                    BinOp::Pow => l.powf(r),
                }
            }
            Expr::Call { func, arg } => {
                let a = arg.eval(x)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(ExprEvalError::LogNonPositive {
                                node: self.to_string(),
                                arg: a,
                                x,
                            });
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(ExprEvalError::SqrtNegative {
                                node: self.to_string(),
                                arg: a,
                                x,
                            });
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                }
            }
        };
        if !value.is_finite() {
            return Err(ExprEvalError::NonFinite {
                node: self.to_string(),
                x,
            });
        }
        Ok(value)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Number(_) | Expr::Var | Expr::Call { .. } => 5,
            Expr::Binary { op: BinOp::Pow, .. } => 4,
            Expr::Neg(_) => 3,
            Expr::Binary {
                op: BinOp::Mul | BinOp::Div,
                ..
            } => 2,
            Expr::Binary {
                op: BinOp::Add | BinOp::Sub,
                ..
            } => 1,
        }
    }
}

/// Canonical text form. Re-parsing it reproduces the tree, with negative
/// number literals normalized (the parser folds `-` applied to a bare literal
/// into the literal itself).
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
            if wrap {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Number(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(inner) => {
                write!(f, "-")?;
                wrapped(f, inner, inner.precedence() < self.precedence())
            }
            Expr::Binary { op, lhs, rhs } => {
                let prec = self.precedence();
                let symbol = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                if *op == BinOp::Pow {
                    // left operand of ^ must be an atom; a negative literal
                    // would re-parse as negation of the whole power
                    let wrap_lhs = lhs.precedence() <= prec
                        || matches!(**lhs, Expr::Number(n) if n.is_sign_negative());
                    wrapped(f, lhs, wrap_lhs)?;
                    write!(f, "{symbol}")?;
                    wrapped(f, rhs, rhs.precedence() < 3)
                } else {
                    wrapped(f, lhs, lhs.precedence() < prec)?;
                    write!(f, "{symbol}")?;
                    wrapped(f, rhs, rhs.precedence() <= prec)
                }
            }
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Compiles an expression into a [`RealFunction`] on the given domain,
/// attaching symbolic first and second derivatives when the expression is
/// differentiable (i.e. contains no `abs`).
pub fn to_real_function(expr: &Expr, domain: Interval) -> RealFunction {
    fn adapt(e: ExprEvalError, x: f64) -> Error {
        Error::Eval {
            x,
            reason: e.to_string(),
        }
    }
    let body = expr.clone();
    let mut f = RealFunction::new_fallible(domain, move |x| body.eval(x).map_err(|e| adapt(e, x)));
    if let Ok(d1) = differentiate(expr) {
        let d1_body = d1.clone();
        f = f.with_derivative_fallible(move |x| d1_body.eval(x).map_err(|e| adapt(e, x)));
        if let Ok(d2) = differentiate(&d1) {
            f = f.with_second_derivative_fallible(move |x| d2.eval(x).map_err(|e| adapt(e, x)));
        }
    }
    f
}
