//! A small expression language for the scalar nonlinearities and
//! coefficient functions, plus sampling-based property certificates.
//!
//! Grammar (see `docs/grammar.md` for the EBNF):
//!
//! ```text
//! sum     = product { ("+" | "-") product }
//! product = power { ("*" | "/") power }
//! power   = unary [ "^" power ]
//! unary   = "-" unary | atom
//! atom    = number | ident | ident "(" sum { "," sum } ")" | "(" sum ")"
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`.

mod certify;
mod parse;

use std::fmt;

use thiserror::Error;

pub use certify::{check_properties, Certificate, Certificates, CertifyError, Property, ScalarMap, Status, PROPERTY_TOL};
pub use parse::parse;

/// Variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    T,
    S,
    U,
    V,
}

impl Var {
    fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
            Var::S => "s",
            Var::U => "u",
            Var::V => "v",
        }
    }

    fn from_name(name: &str) -> Option<Var> {
        Some(match name {
            "x" => Var::X,
            "t" => Var::T,
            "s" => Var::S,
            "u" => Var::U,
            "v" => Var::V,
            _ => return None,
        })
    }
}

/// Which variables an expression is allowed to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// One-variable map in `x` (Φ, W, g).
    Unary,
    /// Coefficient function of `t` (a, f, h, b).
    Coefficient,
    /// Kernel `k(t, s)`.
    Kernel,
    /// Dynamic-equation kernel `K(t, u)`.
    IvpKernel,
    /// Dynamic-equation right-hand side `F(t, u, v)`.
    IvpRhs,
}

impl Signature {
    pub fn allowed(self) -> &'static [Var] {
        match self {
            Signature::Unary => &[Var::X],
            Signature::Coefficient => &[Var::T],
            Signature::Kernel => &[Var::T, Var::S],
            Signature::IvpKernel => &[Var::T, Var::U],
            Signature::IvpRhs => &[Var::T, Var::U, Var::V],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Exp,
    Log,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Unary(UnaryFn, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    /// `column` is the 1-based byte position of the offending token
    /// (one past the end of input for premature end).
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },
    #[error("variable `{name}` is not allowed here (allowed: {allowed})")]
    VariableNotAllowed { name: String, allowed: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalFault {
    #[error("log of nonpositive value {0}")]
    LogNonPositive(f64),
    #[error("sqrt of negative value {0}")]
    SqrtNegative(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("pow({0}, {1}) is undefined")]
    PowDomain(f64, f64),
    #[error("non-finite result {0}")]
    NonFinite(f64),
}

/// Values bound to the variables during evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    slots: [f64; 5],
}

impl Env {
    pub fn x(x: f64) -> Env {
        Env::default().with(Var::X, x)
    }

    pub fn t(t: f64) -> Env {
        Env::default().with(Var::T, t)
    }

    pub fn ts(t: f64, s: f64) -> Env {
        Env::default().with(Var::T, t).with(Var::S, s)
    }

    pub fn tuv(t: f64, u: f64, v: f64) -> Env {
        Env::default().with(Var::T, t).with(Var::U, u).with(Var::V, v)
    }

    pub fn with(mut self, var: Var, value: f64) -> Env {
        self.slots[var.slot()] = value;
        self
    }
}

fn finite(v: f64) -> Result<f64, EvalFault> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalFault::NonFinite(v))
    }
}

impl Expr {
    /// Parse and check that only the variables of `sig` occur.
    pub fn parse_for(text: &str, sig: Signature) -> Result<Expr, ParseError> {
        let e = parse(text)?;
        e.check_signature(sig)?;
        Ok(e)
    }

    pub fn check_signature(&self, sig: Signature) -> Result<(), ParseError> {
        let allowed = sig.allowed();
        let mut bad = None;
        self.visit_vars(&mut |v| {
            if bad.is_none() && !allowed.contains(&v) {
                bad = Some(v);
            }
        });
        match bad {
            None => Ok(()),
            Some(v) => Err(ParseError::VariableNotAllowed {
                name: v.name().to_string(),
                allowed: allowed.iter().map(|v| v.name()).collect::<Vec<_>>().join(","),
            }),
        }
    }

    fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Neg(e) | Expr::Unary(_, e) => e.visit_vars(f),
            Expr::Binary(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
        }
    }

    pub fn eval(&self, env: &Env) -> Result<f64, EvalFault> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(v) => Ok(env.slots[v.slot()]),
            Expr::Neg(e) => Ok(-e.eval(env)?),
            Expr::Unary(op, e) => {
                let x = e.eval(env)?;
                match op {
                    UnaryFn::Exp => finite(x.exp()),
                    UnaryFn::Log if x <= 0.0 => Err(EvalFault::LogNonPositive(x)),
                    UnaryFn::Log => Ok(x.ln()),
                    UnaryFn::Sqrt if x < 0.0 => Err(EvalFault::SqrtNegative(x)),
                    UnaryFn::Sqrt => Ok(x.sqrt()),
                    UnaryFn::Abs => Ok(x.abs()),
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval(env)?;
                let b = r.eval(env)?;
                match op {
                    BinOp::Add => finite(a + b),
                    BinOp::Sub => finite(a - b),
                    BinOp::Mul => finite(a * b),
                    BinOp::Div if b == 0.0 => Err(EvalFault::DivisionByZero),
                    BinOp::Div => finite(a / b),
                    BinOp::Pow => {
                        let v = a.powf(b);
                        if v.is_nan() || (a == 0.0 && b < 0.0) {
                            Err(EvalFault::PowDomain(a, b))
                        } else {
                            finite(v)
                        }
                    }
                    BinOp::Min => Ok(a.min(b)),
                    BinOp::Max => Ok(a.max(b)),
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized form; parsing it yields an identical tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Unary(op, e) => {
                let name = match op {
                    UnaryFn::Exp => "exp",
                    UnaryFn::Log => "log",
                    UnaryFn::Sqrt => "sqrt",
                    UnaryFn::Abs => "abs",
                };
                write!(f, "{name}({e})")
            }
            Expr::Binary(op, l, r) => match op {
                BinOp::Add => write!(f, "({l} + {r})"),
                BinOp::Sub => write!(f, "({l} - {r})"),
                BinOp::Mul => write!(f, "({l} * {r})"),
                BinOp::Div => write!(f, "({l} / {r})"),
                BinOp::Pow => write!(f, "pow({l}, {r})"),
                BinOp::Min => write!(f, "min({l}, {r})"),
                BinOp::Max => write!(f, "max({l}, {r})"),
            },
        }
    }
}
