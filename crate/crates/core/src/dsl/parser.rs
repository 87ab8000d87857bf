//! Recursive-descent parser for the metric expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*'|'/') factor)* ;
//! factor := base ('^' integer)? ;
//! base   := number | ident | '(' expr ')' | func '(' expr ')' | '-' base ;
//! func   := 'sin'|'cos'|'tan'|'exp'|'log'|'sqrt'|'atan' ;
//! ```
//!
//! Note that `-x^2` is `(-x)^2` under this grammar.

use super::ast::{BinOp, Expr, ExprKind, Func};
use crate::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, integer: bool },
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Ident(s) => format!("identifier {s}"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut integer = true;
            if i < bytes.len() && bytes[i] == b'.' {
                integer = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integer = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let value: f64 = src[start..i].parse().map_err(|_| ParseError {
                kind: ParseErrorKind::Lexical(c as char),
                offset: start,
            })?;
            out.push((Tok::Num { value, integer }, start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                kind: ParseErrorKind::Lexical(ch),
                offset: i,
            });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().describe(),
            },
            offset: self.pos(),
        }
    }

    fn expect(&mut self, sym: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(sym) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{sym}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let pos = lhs.pos;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            let pos = lhs.pos;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let exp_pos = self.pos();
        let negative = match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                true
            }
            Tok::Sym('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let non_integer = ParseError {
            kind: ParseErrorKind::NonIntegerExponent,
            offset: exp_pos,
        };
        match self.peek().clone() {
            Tok::Num {
                value,
                integer: true,
            } if value <= i32::MAX as f64 => {
                self.bump();
                let k = if negative { -(value as i32) } else { value as i32 };
                let pos = base.pos;
                Ok(Expr::new(ExprKind::Pow(Box::new(base), k), pos))
            }
            Tok::Num { .. } | Tok::Ident(_) | Tok::Sym('(') => Err(non_integer),
            _ => Err(self.unexpected("integer exponent")),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = (self.peek().clone(), self.pos());
        if !matches!(tok, Tok::Num { .. } | Tok::Ident(_) | Tok::Sym('-') | Tok::Sym('(')) {
            return Err(self.unexpected("number, identifier, '(' or '-'"));
        }
        self.bump();
        match tok {
            Tok::Num { value, .. } => Ok(Expr::new(ExprKind::Const(value), pos)),
            Tok::Sym('-') => {
                let inner = self.base()?;
                Ok(Expr::new(ExprKind::Neg(Box::new(inner)), pos))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::Sym('(') {
                        return Err(ParseError {
                            kind: ParseErrorKind::Arity(name),
                            offset: self.pos(),
                        });
                    }
                    self.bump();
                    if *self.peek() == Tok::Sym(')') {
                        return Err(ParseError {
                            kind: ParseErrorKind::Arity(name),
                            offset: self.pos(),
                        });
                    }
                    let arg = self.expr()?;
                    if *self.peek() == Tok::Sym(',') {
                        return Err(ParseError {
                            kind: ParseErrorKind::Arity(name),
                            offset: self.pos(),
                        });
                    }
                    self.expect(')')?;
                    Ok(Expr::new(ExprKind::Call(func, Box::new(arg)), pos))
                } else if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    Ok(Expr::new(ExprKind::Var(i), pos))
                } else {
                    Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        offset: pos,
                    })
                }
            }
            _ => unreachable!("token class checked above"),
        }
    }
}

/// Parses `source` with the given coordinate names.
pub fn parse_expr(source: &str, coords: &[String]) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        at: 0,
        coords,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn literal_zero() {
        let e = parse_expr("0", &names(&["x", "y"])).unwrap();
        assert_eq!(e.kind, ExprKind::Const(0.0));
    }

    #[test]
    fn nested_div_pow() {
        let c = names(&["x1", "x2"]);
        let e = parse_expr("4/(1+x1^2+x2^2)^2", &c).unwrap();
        let ExprKind::Binary(BinOp::Div, num, den) = &e.kind else {
            panic!("expected division, got {e:?}");
        };
        assert_eq!(num.kind, ExprKind::Const(4.0));
        let ExprKind::Pow(inner, 2) = &den.kind else {
            panic!("expected square");
        };
        assert!(matches!(inner.kind, ExprKind::Binary(BinOp::Add, ..)));
        assert_eq!(e.eval(&[0.0, 0.0], ()).unwrap(), 4.0);
    }

    #[test]
    fn unknown_identifier_offset() {
        let err = parse_expr("sin(q)*r", &names(&["r"])).unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("q".into()));
        assert_eq!(err.to_string(), "unknown identifier q at offset 4");
    }

    #[test]
    fn error_cases() {
        let c = names(&["x"]);
        let e = parse_expr("x^1.5", &c).unwrap_err();
        assert_eq!((e.kind, e.offset), (ParseErrorKind::NonIntegerExponent, 2));
        let e = parse_expr("x^x", &c).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent);
        let e = parse_expr("sin(x, x)", &c).unwrap_err();
        assert_eq!((e.kind, e.offset), (ParseErrorKind::Arity("sin".into()), 5));
        let e = parse_expr("exp x", &c).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity("exp".into()));
        let e = parse_expr("x $ 2", &c).unwrap_err();
        assert_eq!((e.kind, e.offset), (ParseErrorKind::Lexical('$'), 2));
        assert!(parse_expr("(x", &c).is_err());
        assert!(parse_expr("x^2^2", &c).is_err());
        assert!(parse_expr("", &c).is_err());
    }

    #[test]
    fn unary_minus_binds_inside_power() {
        let c = names(&["x"]);
        let e = parse_expr("-x^2", &c).unwrap();
        assert_eq!(e.eval(&[3.0], ()).unwrap(), 9.0);
        let e = parse_expr("0-x^2", &c).unwrap();
        assert_eq!(e.eval(&[3.0], ()).unwrap(), -9.0);
        let e = parse_expr("x^-2", &c).unwrap();
        assert_eq!(e.eval(&[2.0], ()).unwrap(), 0.25);
    }

    #[test]
    fn eval_domain_errors() {
        let c = names(&["x"]);
        for src in ["log(x)", "sqrt(x-1)", "1/x", "x^-1"] {
            let e = parse_expr(src, &c).unwrap();
            assert!(e.eval(&[0.0], ()).is_err(), "{src}");
        }
        let e = parse_expr("2*log(x)", &c).unwrap();
        match e.eval(&[-1.0], ()) {
            Err(crate::Error::Domain { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pretty_print_examples() {
        let c = names(&["x", "y"]);
        for src in [
            "-x^2",
            "-(x^2)",
            "x-(y-x)",
            "x/(y*x)",
            "x*y^-3",
            "sin(x)^2+cos(y)^2",
            "--x",
            "0.125*exp(x*y)",
            "1e-20+x",
        ] {
            let e = parse_expr(src, &c).unwrap();
            let printed = e.display(&c).to_string();
            let again = parse_expr(&printed, &c).unwrap();
            assert_eq!(e, again, "{src} -> {printed}");
        }
    }
}
