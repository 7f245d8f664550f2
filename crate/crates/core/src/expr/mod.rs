//! A small expression language for scalar functions of `x`.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | "x" | "e" | "pi" | func "(" expr ")" | "(" expr ")"
//! func    := "ln" | "exp" | "sqrt" | "recip"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-x` is `2^(-x)`.

mod ast;
mod diff;
mod eval;
mod parse;
mod shape;

pub use ast::{BinOp, Constant, Expr, Func};
pub use eval::EvalError;
pub use parse::ParseError;
pub use shape::{
    check_shape, check_shape_with, ShapeMode, ShapeReport, DEFAULT_SHAPE_GRID, DEFAULT_SHAPE_TOL,
};

use std::fmt;
use std::str::FromStr;

/// A parsed scalar function of one variable.
///
/// Values are immutable; evaluation is a pure function of the tree and the
/// argument.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncExpr {
    root: Expr,
}

impl FuncExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse::parse(text).map(|root| FuncExpr { root })
    }

    pub fn from_expr(root: Expr) -> Self {
        FuncExpr { root }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        eval::eval(&self.root, x)
    }

    /// Symbolic derivative with respect to `x`.
    pub fn derivative(&self) -> FuncExpr {
        FuncExpr {
            root: diff::differentiate(&self.root),
        }
    }

    /// `-f`, used to turn a concavity question into a convexity one.
    pub fn negated(&self) -> FuncExpr {
        FuncExpr {
            root: Expr::Neg(Box::new(self.root.clone())),
        }
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl FromStr for FuncExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FuncExpr::parse(s)
    }
}

impl serde::Serialize for FuncExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for FuncExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        FuncExpr::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Symbolic derivative, as a free function.
pub fn differentiate(f: &FuncExpr) -> FuncExpr {
    f.derivative()
}
