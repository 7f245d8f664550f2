//! Symbolic differentiation with light simplification.
//!
//! The smart constructors below fold literal arithmetic and apply the
//! identities `0*u = 0`, `1*u = u`, `u +- 0 = u`, `u/1 = u`, `u^0 = 1`,
//! `u^1 = u`. Nothing is expanded or factored.

use super::ast::{BinOp, Expr, Func};

fn lit(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        // normalizes -0.0
        Expr::Num(v + 0.0)
    }
}

fn is_lit(e: &Expr, v: f64) -> bool {
    e.as_literal() == Some(v)
}

fn fold(a: &Expr, b: &Expr, f: impl Fn(f64, f64) -> f64) -> Option<Expr> {
    let r = f(a.as_literal()?, b.as_literal()?);
    r.is_finite().then(|| lit(r))
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Bin(op, Box::new(a), Box::new(b))
}

pub(super) fn add(a: Expr, b: Expr) -> Expr {
    if is_lit(&a, 0.0) {
        return b;
    }
    if is_lit(&b, 0.0) {
        return a;
    }
    fold(&a, &b, |x, y| x + y).unwrap_or_else(|| bin(BinOp::Add, a, b))
}

pub(super) fn sub(a: Expr, b: Expr) -> Expr {
    if is_lit(&b, 0.0) {
        return a;
    }
    if is_lit(&a, 0.0) {
        return neg(b);
    }
    fold(&a, &b, |x, y| x - y).unwrap_or_else(|| bin(BinOp::Sub, a, b))
}

pub(super) fn mul(a: Expr, b: Expr) -> Expr {
    if is_lit(&a, 0.0) || is_lit(&b, 0.0) {
        return lit(0.0);
    }
    if is_lit(&a, 1.0) {
        return b;
    }
    if is_lit(&b, 1.0) {
        return a;
    }
    fold(&a, &b, |x, y| x * y).unwrap_or_else(|| bin(BinOp::Mul, a, b))
}

pub(super) fn div(a: Expr, b: Expr) -> Expr {
    if is_lit(&b, 1.0) {
        return a;
    }
    if is_lit(&a, 0.0) && !is_lit(&b, 0.0) {
        return lit(0.0);
    }
    if is_lit(&b, 0.0) {
        return bin(BinOp::Div, a, b);
    }
    fold(&a, &b, |x, y| x / y).unwrap_or_else(|| bin(BinOp::Div, a, b))
}

pub(super) fn pow(a: Expr, b: Expr) -> Expr {
    if is_lit(&b, 0.0) {
        return lit(1.0);
    }
    if is_lit(&b, 1.0) {
        return a;
    }
    bin(BinOp::Pow, a, b)
}

pub(super) fn neg(a: Expr) -> Expr {
    if let Some(v) = a.as_literal() {
        return lit(-v);
    }
    match a {
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

pub(super) fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Const(_) => lit(0.0),
        Expr::X => lit(1.0),
        Expr::Neg(u) => neg(differentiate(u)),
        Expr::Bin(op, u, v) => {
            let (u, v) = (&**u, &**v);
            match op {
                BinOp::Add => add(differentiate(u), differentiate(v)),
                BinOp::Sub => sub(differentiate(u), differentiate(v)),
                BinOp::Mul => add(
                    mul(differentiate(u), v.clone()),
                    mul(u.clone(), differentiate(v)),
                ),
                BinOp::Div => {
                    if v.is_constant() {
                        div(differentiate(u), v.clone())
                    } else {
                        div(
                            sub(
                                mul(differentiate(u), v.clone()),
                                mul(u.clone(), differentiate(v)),
                            ),
                            pow(v.clone(), lit(2.0)),
                        )
                    }
                }
                BinOp::Pow => diff_pow(u, v),
            }
        }
        Expr::Call(f, u) => {
            let du = differentiate(u);
            let u = (**u).clone();
            match f {
                Func::Ln => div(du, u),
                Func::Exp => mul(call(Func::Exp, u), du),
                Func::Sqrt => div(du, mul(lit(2.0), call(Func::Sqrt, u))),
                Func::Recip => neg(div(du, pow(u, lit(2.0)))),
            }
        }
    }
}

fn diff_pow(u: &Expr, v: &Expr) -> Expr {
    if v.is_constant() {
        // d(u^c) = c u^(c-1) u'
        let reduced = match v.as_literal() {
            Some(c) => lit(c - 1.0),
            None => sub(v.clone(), lit(1.0)),
        };
        return mul(mul(v.clone(), pow(u.clone(), reduced)), differentiate(u));
    }
    if u.is_constant() {
        // d(c^v) = c^v ln(c) v'
        return mul(
            mul(pow(u.clone(), v.clone()), call(Func::Ln, u.clone())),
            differentiate(v),
        );
    }
    // d(u^v) = u^v (v' ln u + v u'/u)
    mul(
        pow(u.clone(), v.clone()),
        add(
            mul(differentiate(v), call(Func::Ln, u.clone())),
            div(mul(v.clone(), differentiate(u)), u.clone()),
        ),
    )
}

#[cfg(test)]
mod tests {
    use crate::expr::FuncExpr;

    fn d(s: &str) -> FuncExpr {
        FuncExpr::parse(s).unwrap().derivative()
    }

    #[test]
    fn simplification_keeps_trees_small() {
        assert_eq!(d("x").to_string(), "1");
        assert_eq!(d("5").to_string(), "0");
        assert_eq!(d("x^3").to_string(), "3 * x^2");
        assert_eq!(d("x^2").to_string(), "2 * x");
        assert_eq!(d("-ln(x)").to_string(), "-(1 / x)");
        assert_eq!(d("3*x + 2").to_string(), "3");
        assert_eq!(d("x*ln(x)").to_string(), "ln(x) + x * (1 / x)");
    }

    #[test]
    fn negative_literals_print_and_reparse() {
        let f = d("1/x");
        let again = FuncExpr::parse(&f.to_string()).unwrap();
        assert_eq!(f, again);
        assert_eq!(f.eval(2.0).unwrap(), -0.25);
        let g = d("x^-2");
        assert_eq!(FuncExpr::parse(&g.to_string()).unwrap(), g);
        assert_eq!(g.eval(2.0).unwrap(), -0.25);
    }

    #[test]
    fn general_power_rules() {
        // d(2^x) = 2^x ln 2
        let v = d("2^x").eval(3.0).unwrap();
        assert!((v - 8.0 * 2f64.ln()).abs() < 1e-14);
        // d(x^x) = x^x (ln x + 1)
        let v = d("x^x").eval(2.0).unwrap();
        assert!((v - 4.0 * (2f64.ln() + 1.0)).abs() < 1e-13);
        let v = d("sqrt(x)").eval(4.0).unwrap();
        assert_eq!(v, 0.25);
        let v = d("recip(x)").eval(2.0).unwrap();
        assert_eq!(v, -0.25);
    }
}
