use thiserror::Error;

use super::ast::{BinOp, Expr, Func};

/// Evaluation failed at a specific subexpression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{node}`: {reason} (argument {arg})")]
    Domain {
        node: String,
        reason: &'static str,
        arg: f64,
    },
    #[error("non-finite value from `{node}` at x = {x}")]
    NonFinite { node: String, x: f64 },
}

fn domain(node: &Expr, reason: &'static str, arg: f64) -> EvalError {
    EvalError::Domain {
        node: node.to_string(),
        reason,
        arg,
    }
}

/// Largest integer exponent evaluated with `powi`.
const MAX_POWI: f64 = 1024.0;

pub(super) fn eval(e: &Expr, x: f64) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Num(c) => *c,
        Expr::Const(c) => c.value(),
        Expr::X => x,
        Expr::Neg(u) => -eval(u, x)?,
        Expr::Call(func, u) => {
            let arg = eval(u, x)?;
            match func {
                Func::Ln => {
                    if arg <= 0.0 {
                        return Err(domain(e, "logarithm of a non-positive value", arg));
                    }
                    arg.ln()
                }
                Func::Exp => arg.exp(),
                Func::Sqrt => {
                    if arg < 0.0 {
                        return Err(domain(e, "square root of a negative value", arg));
                    }
                    arg.sqrt()
                }
                Func::Recip => {
                    if arg == 0.0 {
                        return Err(domain(e, "reciprocal of zero", arg));
                    }
                    arg.recip()
                }
            }
        }
        Expr::Bin(op, l, r) => {
            let lv = eval(l, x)?;
            let rv = eval(r, x)?;
            match op {
                BinOp::Add => lv + rv,
                BinOp::Sub => lv - rv,
                BinOp::Mul => lv * rv,
                BinOp::Div => {
                    if rv == 0.0 {
                        return Err(domain(e, "division by zero", rv));
                    }
                    lv / rv
                }
                BinOp::Pow => pow(e, lv, rv)?,
            }
        }
    };
    if !v.is_finite() {
        return Err(EvalError::NonFinite {
            node: e.to_string(),
            x,
        });
    }
    Ok(v)
}

fn pow(node: &Expr, base: f64, exp: f64) -> Result<f64, EvalError> {
    let integral = exp.fract() == 0.0 && exp.abs() <= MAX_POWI;
    if base == 0.0 && exp < 0.0 {
        return Err(domain(node, "zero raised to a negative power", base));
    }
    if integral {
        // Integer powers go through repeated multiplication.
        return Ok(base.powi(exp as i32));
    }
    if base < 0.0 {
        return Err(domain(
            node,
            "negative base with non-integer exponent",
            base,
        ));
    }
    Ok(base.powf(exp))
}

#[cfg(test)]
mod tests {
    use crate::expr::FuncExpr;

    use super::*;

    fn ev(s: &str, x: f64) -> Result<f64, EvalError> {
        FuncExpr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn domain_errors_name_the_node() {
        match ev("1 + ln(x - 2)", 1.0) {
            Err(EvalError::Domain { node, arg, .. }) => {
                assert_eq!(node, "ln(x - 2)");
                assert_eq!(arg, -1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ev("sqrt(x)", -1.0), Err(EvalError::Domain { .. })));
        assert_eq!(ev("sqrt(x)", 0.0).unwrap(), 0.0);
        assert!(matches!(ev("1/x", 0.0), Err(EvalError::Domain { .. })));
        assert!(matches!(ev("recip(x)", 0.0), Err(EvalError::Domain { .. })));
        assert!(matches!(ev("x^0.5", -4.0), Err(EvalError::Domain { .. })));
        assert!(matches!(ev("x^-1", 0.0), Err(EvalError::Domain { .. })));
        assert!(matches!(
            ev("exp(x)", 1000.0),
            Err(EvalError::NonFinite { .. })
        ));
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        assert_eq!(ev("x^3", -2.0).unwrap(), -8.0);
        assert_eq!(ev("x^-2", -2.0).unwrap(), 0.25);
        assert_eq!(ev("x^0", 0.0).unwrap(), 1.0);
    }

    #[test]
    fn constants() {
        assert_eq!(ev("ln(e)", 0.0).unwrap(), 1.0);
        assert_eq!(ev("pi", 0.0).unwrap(), std::f64::consts::PI);
        assert_eq!(ev("recip(4)", 0.0).unwrap(), 0.25);
    }

    #[test]
    fn evaluation_is_bitwise_deterministic() {
        let f = FuncExpr::parse("exp(-x/3)*sqrt(x) + x^2.5 - 1/x").unwrap();
        for i in 1..50 {
            let x = i as f64 * 0.37;
            assert_eq!(
                f.eval(x).unwrap().to_bits(),
                f.clone().eval(x).unwrap().to_bits()
            );
        }
    }
}
