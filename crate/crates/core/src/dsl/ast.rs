use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// Non-negative decimal literal; negative numbers are `Neg(Const)`.
    Const(f64),
    /// Index into the coordinate list.
    Var(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// Expression node with the byte offset where it starts in its source.
///
/// Equality is structural: source positions are ignored.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, pos: usize) -> Self {
        Expr { kind, pos }
    }

    /// Literal for any finite value; negative values become a negation node.
    pub fn number(v: f64) -> Self {
        if v < 0.0 {
            Expr::new(ExprKind::Neg(Box::new(Expr::number(-v))), 0)
        } else {
            Expr::new(ExprKind::Const(v), 0)
        }
    }

    pub fn var(index: usize) -> Self {
        Expr::new(ExprKind::Var(index), 0)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), 0)
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Expr::new(ExprKind::Call(f, Box::new(arg)), 0)
    }

    pub fn pow(base: Expr, k: i32) -> Self {
        Expr::new(ExprKind::Pow(Box::new(base), k), 0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ExprKind::Const(c) if c == 0.0)
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match &self.kind {
            ExprKind::Const(_) => None,
            ExprKind::Var(i) => Some(*i),
            ExprKind::Neg(e) | ExprKind::Call(_, e) | ExprKind::Pow(e, _) => e.max_var(),
            ExprKind::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Evaluates over any [`Scalar`]; `vars` are the coordinate values in
    /// declaration order.
    pub fn eval<S: Scalar>(&self, vars: &[S], ctx: S::Context) -> Result<S> {
        let domain = |message: &str| Error::Domain {
            offset: self.pos,
            message: message.to_string(),
        };
        Ok(match &self.kind {
            ExprKind::Const(c) => S::constant(ctx, *c),
            ExprKind::Var(i) => vars
                .get(*i)
                .cloned()
                .ok_or_else(|| domain("variable index out of range"))?,
            ExprKind::Neg(e) => -e.eval(vars, ctx)?,
            ExprKind::Call(f, e) => {
                let a = e.eval(vars, ctx)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Atan => a.atan(),
                    Func::Log => {
                        if a.real() <= 0.0 {
                            return Err(domain("log of a non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a.real() < 0.0 {
                            return Err(domain("sqrt of a negative value"));
                        }
                        a.sqrt()
                    }
                }
            }
            ExprKind::Binary(op, l, r) => {
                let a = l.eval(vars, ctx)?;
                let b = r.eval(vars, ctx)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.real() == 0.0 {
                            return Err(domain("division by zero"));
                        }
                        a / b
                    }
                }
            }
            ExprKind::Pow(e, k) => {
                let a = e.eval(vars, ctx)?;
                if *k < 0 && a.real() == 0.0 {
                    return Err(domain("division by zero in negative power"));
                }
                a.powi(*k)
            }
        })
    }

    /// Source text that reparses to a structurally identical tree.
    pub fn display<'a>(&'a self, coords: &'a [String]) -> Display<'a> {
        Display { expr: self, coords }
    }
}

pub struct Display<'a> {
    expr: &'a Expr,
    coords: &'a [String],
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Expr,
    Term,
    Base,
}

fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v.fract() == 0.0 && v < 1e15 {
        write!(f, "{}", v as u64)
    } else {
        write!(f, "{v:e}")
    }
}

impl Display<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, ctx: Prec) -> fmt::Result {
        let own = match &e.kind {
            ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => Prec::Expr,
            ExprKind::Binary(..) => Prec::Term,
            // a pow is a factor; as an operand it must be a base
            ExprKind::Pow(..) => Prec::Term,
            _ => Prec::Base,
        };
        let paren = match (&e.kind, ctx) {
            (ExprKind::Pow(..), Prec::Term) => false,
            _ => own < ctx,
        };
        if paren {
            f.write_str("(")?;
        }
        match &e.kind {
            ExprKind::Const(c) => write_number(f, *c)?,
            ExprKind::Var(i) => f.write_str(&self.coords[*i])?,
            ExprKind::Neg(inner) => {
                f.write_str("-")?;
                self.write(f, inner, Prec::Base)?;
            }
            ExprKind::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                self.write(f, arg, Prec::Expr)?;
                f.write_str(")")?;
            }
            ExprKind::Binary(op, l, r) => {
                let (lp, rp) = match op {
                    BinOp::Add | BinOp::Sub => (Prec::Expr, Prec::Term),
                    BinOp::Mul | BinOp::Div => (Prec::Term, Prec::Base),
                };
                self.write(f, l, lp)?;
                write!(f, "{}", op.symbol())?;
                // the right operand of * and / is a factor, so a bare pow is fine
                if matches!(r.kind, ExprKind::Pow(..)) && rp == Prec::Base {
                    self.write(f, r, Prec::Term)?;
                } else {
                    self.write(f, r, rp)?;
                }
            }
            ExprKind::Pow(base, k) => {
                self.write(f, base, Prec::Base)?;
                write!(f, "^{k}")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, Prec::Expr)
    }
}
