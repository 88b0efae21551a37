//! Scalar expressions of one real variable.
//!
//! Coefficients and generating functions enter the library as strings in a
//! small expression language and are compiled to [`ScalarFunction`] values
//! with exact symbolic derivatives.
//!
//! # Grammar
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?                  (right-associative)
//! atom    := NUMBER | 'x' | 'pi' | 'e'
//!          | FUNC '(' expr ')'
//!          | 'pow' '(' expr ',' expr ')'
//!          | '(' expr ')'
//! FUNC    := exp | log | sin | cos | tan | tanh | sinh | cosh | sqrt | abs
//! NUMBER  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//! ```
//!
//! Precedence, loosest to tightest: `+ -`, then `* /`, then unary `-`,
//! then `^`. So `-x^2` parses as `-(x^2)`, and `2^3^2` as `2^(3^2)`.
//! There is no implicit multiplication: `2x` is a syntax error.
//! `pow(a, b)` is normalized to the `a^b` tree at parse time.
//!
//! All arithmetic is IEEE-754 binary64. Evaluation reports domain errors
//! (log of a non-positive value, square root of a negative value, division
//! by zero) and non-finite results instead of propagating them silently.

mod deriv;
mod parser;

use std::fmt;

use crate::calculus::{Interval, PointError, ScalarFunction};

pub use parser::parse;

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Built-in functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Tanh,
    Sinh,
    Cosh,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Tanh => "tanh",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "tanh" => Func::Tanh,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Named constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

/// Abstract syntax tree of a scalar expression in the variable `x`.
///
/// Trees are immutable after parsing; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// The variable `x`.
    Var,
    /// A numeric literal.
    Num(f64),
    /// `pi` or `e`.
    Const(Constant),
    /// Unary negation.
    Neg(Box<Expr>),
    /// Binary operation.
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Function application.
    Call(Func, Box<Expr>),
}

/// Parse failure, with the byte offset into the source.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message} (expected one of: {})", expected.join(", "))]
    Syntax {
        offset: usize,
        message: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

/// Evaluation failure at a specific point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain error at x = {x}: {reason} in `{subexpr}`")]
    Domain {
        subexpr: String,
        x: f64,
        reason: String,
    },
    #[error("non-finite result at x = {x} in `{subexpr}`")]
    NonFinite { subexpr: String, x: f64 },
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    /// Evaluate at `x`.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        if !x.is_finite() {
            return Err(EvalError::NonFinite {
                subexpr: "x".to_string(),
                x,
            });
        }
        let v = self.eval_inner(x)?;
        Ok(v)
    }

    fn eval_inner(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Var => x,
            Expr::Num(v) => *v,
            Expr::Const(c) => c.value(),
            Expr::Neg(e) => -e.eval_inner(x)?,
            Expr::Bin(op, l, r) => {
                let lv = l.eval_inner(x)?;
                let rv = r.eval_inner(x)?;
                match op {
                    BinOp::Add => lv + rv,
                    BinOp::Sub => lv - rv,
                    BinOp::Mul => lv * rv,
                    BinOp::Div => {
                        if rv == 0.0 {
                            return Err(self.domain_err(x, "division by zero"));
                        }
                        lv / rv
                    }
                    BinOp::Pow => lv.powf(rv),
                }
            }
            Expr::Call(f, arg) => {
                let a = arg.eval_inner(x)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(self.domain_err(x, "log of a non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Tanh => a.tanh(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain_err(x, "square root of a negative value"));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                subexpr: self.to_string(),
                x,
            })
        }
    }

    fn domain_err(&self, x: f64, reason: &str) -> EvalError {
        EvalError::Domain {
            subexpr: self.to_string(),
            x,
            reason: reason.to_string(),
        }
    }

    /// Symbolic derivative with respect to `x`, constant-folded.
    ///
    /// `abs` is differentiated as `u'·u/abs(u)`, which is undefined at
    /// `u = 0` (evaluation reports division by zero there).
    pub fn derive(&self) -> Expr {
        deriv::derive(self).fold_constants()
    }

    /// Bottom-up constant folding: numeric subtrees are collapsed, and the
    /// unit/annihilator identities `u+0`, `u-0`, `0-u`, `u*0`, `u*1`,
    /// `u/1`, `u^0`, `u^1` are applied. Folding `u*0 -> 0` can erase a
    /// domain error that `u` alone would raise.
    pub fn fold_constants(&self) -> Expr {
        deriv::fold(self)
    }

    /// True when the tree is a polynomial in `x`: only arithmetic on
    /// literals, constants, and `x`, with non-negative integer powers.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Var | Expr::Num(_) | Expr::Const(_) => true,
            Expr::Neg(e) => e.is_polynomial(),
            Expr::Bin(BinOp::Add | BinOp::Sub | BinOp::Mul, l, r) => {
                l.is_polynomial() && r.is_polynomial()
            }
            Expr::Bin(BinOp::Div, l, r) => {
                l.is_polynomial() && matches!(**r, Expr::Num(_) | Expr::Const(_))
            }
            Expr::Bin(BinOp::Pow, l, r) => {
                l.is_polynomial()
                    && matches!(**r, Expr::Num(n) if n >= 0.0 && n.fract() == 0.0)
            }
            Expr::Call(..) => false,
        }
    }

    /// Compile to a [`ScalarFunction`] on `interval`, carrying the exact
    /// symbolic derivative and a polynomiality hint.
    pub fn function(&self, label: impl Into<String>, interval: Interval) -> ScalarFunction {
        let body = self.clone();
        let deriv = self.derive();
        let f = move |x: f64| body.eval(x).map_err(|e| PointError::new(x, e.to_string()));
        let df = move |x: f64| deriv.eval(x).map_err(|e| PointError::new(x, e.to_string()));
        ScalarFunction::fallible(label, interval, f)
            .with_derivative_fallible(df)
            .with_polynomial_hint(self.is_polynomial())
    }
}

/// Parse a source string and compile it in one step.
pub fn compile(
    source: &str,
    label: impl Into<String>,
    interval: Interval,
) -> Result<ScalarFunction, ParseError> {
    Ok(parse(source)?.function(label, interval))
}

// Printing: minimal parentheses, chosen so that parsing the output
// reproduces the tree (negative literals re-parse as Neg(Num), which
// constant folding maps back).

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        Expr::Num(v) if *v < 0.0 => 3,
        _ => 5,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_child(out: &mut fmt::Formatter<'_>, child: &Expr, min: u8) -> fmt::Result {
            if prec(child) < min {
                write!(out, "({child})")
            } else {
                write!(out, "{child}")
            }
        }
        match self {
            Expr::Var => write!(out, "x"),
            Expr::Num(v) => write!(out, "{v:?}"),
            Expr::Const(c) => write!(out, "{}", c.name()),
            Expr::Neg(e) => {
                write!(out, "-")?;
                write_child(out, e, 3)
            }
            Expr::Bin(op, l, r) => match op {
                BinOp::Add => {
                    write_child(out, l, 1)?;
                    write!(out, "+")?;
                    write_child(out, r, 2)
                }
                BinOp::Sub => {
                    write_child(out, l, 1)?;
                    write!(out, "-")?;
                    write_child(out, r, 2)
                }
                BinOp::Mul => {
                    write_child(out, l, 2)?;
                    write!(out, "*")?;
                    write_child(out, r, 3)
                }
                BinOp::Div => {
                    write_child(out, l, 2)?;
                    write!(out, "/")?;
                    write_child(out, r, 3)
                }
                BinOp::Pow => {
                    write_child(out, l, 5)?;
                    write!(out, "^")?;
                    // right-associative: a^b^c needs no parens on the right
                    write_child(out, r, 3)
                }
            },
            Expr::Call(f, arg) => write!(out, "{}({arg})", f.name()),
        }
    }
}

#[cfg(test)]
mod tests;
