//! Scalar expressions over `t, x1..xn` used to write metric components.
//!
//! Expressions are parsed once into an [`Expr`] tree, evaluated at points
//! `(t, x)`, and differentiated symbolically. Trees are immutable and can be
//! shared freely between threads.
//!
//! Precedence, from tightest to loosest: `^` (right-associative), unary
//! minus, `*` `/`, `+` `-`. So `-x1^2` is `-(x1^2)` and `2^-1` is `0.5`.
//!
//! `abs` is differentiated as `sign(u)·u'` with `sign(0) = 0`, so the
//! derivative of `abs(t)` at `t = 0` is `0` rather than an error.

mod diff;
mod parse;

use std::fmt;

pub use parse::ParseError;

/// Independent variable of a metric formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Time,
    /// Spatial coordinate, zero-based: `Space(0)` is `x1`.
    Space(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Time => write!(f, "t"),
            Var::Space(k) => write!(f, "x{}", k + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    /// Sign function with `sign(0) = 0`; appears in derivatives of `abs`.
    Sign,
}

impl UnaryOp {
    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            "sign" => UnaryOp::Sign,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
            UnaryOp::Sign => "sign",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

/// Why an evaluation failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    NonFinite,
    VariableOutOfRange,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainErrorKind::DivisionByZero => "division by zero",
            DomainErrorKind::LogOfNonPositive => "log of a non-positive value",
            DomainErrorKind::SqrtOfNegative => "sqrt of a negative value",
            DomainErrorKind::NonFinite => "non-finite result",
            DomainErrorKind::VariableOutOfRange => "variable outside the supplied point",
        };
        f.write_str(s)
    }
}

/// Evaluation failure, naming the innermost offending subexpression.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{kind} in `{subexpression}`")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    pub subexpression: String,
}

impl EvalError {
    fn at(kind: DomainErrorKind, node: &Expr) -> Self {
        EvalError {
            kind,
            subexpression: node.to_string(),
        }
    }
}

impl Expr {
    /// Parse `source` for a manifold with `n` spatial dimensions.
    pub fn parse(source: &str, n: usize) -> Result<Expr, ParseError> {
        parse::Parser::new(source, n).parse()
    }

    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn unary(op: UnaryOp, arg: Expr) -> Expr {
        Expr::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Evaluate at time `t` and spatial point `x`.
    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64, EvalError> {
        use DomainErrorKind::*;
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::Time) => t,
            Expr::Var(Var::Space(k)) => match x.get(*k) {
                Some(v) => *v,
                None => return Err(EvalError::at(VariableOutOfRange, self)),
            },
            Expr::Unary(op, arg) => {
                let a = arg.eval(t, x)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::at(LogOfNonPositive, self));
                        }
                        a.ln()
                    }
                    UnaryOp::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::at(SqrtOfNegative, self));
                        }
                        a.sqrt()
                    }
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Sign => {
                        if a > 0.0 {
                            1.0
                        } else if a < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval(t, x)?;
                let b = rhs.eval(t, x)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::at(DivisionByZero, self));
                        }
                        a / b
                    }
                    BinaryOp::Pow => a.powf(b),
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::at(NonFinite, self))
        }
    }

    /// Symbolic partial derivative with respect to `var`. The result is not
    /// simplified beyond dropping terms whose derivative is literally zero.
    pub fn differentiate(&self, var: Var) -> Expr {
        diff::differentiate(self, var)
    }

    /// True if `var` occurs anywhere in the tree.
    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Unary(_, a) => a.depends_on(var),
            Expr::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Largest spatial index referenced, one-based (0 if none).
    pub fn max_space_index(&self) -> usize {
        match self {
            Expr::Var(Var::Space(k)) => k + 1,
            Expr::Const(_) | Expr::Var(Var::Time) => 0,
            Expr::Unary(_, a) => a.max_space_index(),
            Expr::Binary(_, a, b) => a.max_space_index().max(b.max_space_index()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` is the shortest representation that round-trips exactly.
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{:?})", -c)
            }
            Expr::Const(c) => write!(f, "{:?}", c),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}
