use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    E,
    Pi,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::E => std::f64::consts::E,
            Constant::Pi => std::f64::consts::PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::E => "e",
            Constant::Pi => "pi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Ln,
    Exp,
    Sqrt,
    Recip,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Recip => "recip",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "ln" => Some(Func::Ln),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "recip" => Some(Func::Recip),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Expression tree. Parsed literals are always non-negative; a negative
/// constant is `Neg(Num(..))`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    X,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Binding strength used by the printer; higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Const(_) | Expr::X | Expr::Call(..) => 5,
        }
    }

    /// True when the subtree does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => true,
            Expr::X => false,
            Expr::Neg(u) | Expr::Call(_, u) => u.is_constant(),
            Expr::Bin(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Literal value of `Num(c)` or `Neg(Num(c))`.
    pub fn as_literal(&self) -> Option<f64> {
        match self {
            Expr::Num(c) => Some(*c),
            Expr::Neg(u) => match **u {
                Expr::Num(c) => Some(-c),
                _ => None,
            },
            _ => None,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => {
                if *c < 0.0 || c.is_sign_negative() {
                    write!(f, "({c})")
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Const(c) => f.write_str(c.name()),
            Expr::X => f.write_str("x"),
            Expr::Neg(u) => {
                f.write_str("-")?;
                write_child(f, u, u.precedence() < 3)
            }
            Expr::Call(func, u) => write!(f, "{}({u})", func.name()),
            Expr::Bin(BinOp::Pow, base, exp) => {
                write_child(f, base, base.precedence() <= 4)?;
                f.write_str("^")?;
                write_child(f, exp, exp.precedence() < 3)
            }
            Expr::Bin(op, l, r) => {
                let p = self.precedence();
                write_child(f, l, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, r, r.precedence() <= p)
            }
        }
    }
}
