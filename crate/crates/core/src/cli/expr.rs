//! Arithmetic expressions over coordinates and rational literals.

use std::fmt;

use num_bigint::BigInt;

use super::cursor::Cursor;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(_) | Expr::Var(_) => 5,
        }
    }

    pub fn eval(&self) -> Result<Scalar> {
        Ok(match self {
            Expr::Int(n) => Scalar::from_rational(Rational::from_integer(n.clone())),
            Expr::Var(name) => Scalar::var(Var::new(name)),
            Expr::Neg(e) => -e.eval()?,
            Expr::Add(a, b) => a.eval()? + b.eval()?,
            Expr::Sub(a, b) => a.eval()? - b.eval()?,
            Expr::Mul(a, b) => a.eval()? * b.eval()?,
            Expr::Div(a, b) => a.eval()?.try_div(&b.eval()?)?,
            Expr::Pow(a, e) => a.eval()?.pow(*e),
        })
    }

    /// Names of all variables referenced.
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(e) | Expr::Pow(e, _) => e.variables(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_child(f, e, e.precedence() < p)
            }
            Expr::Pow(e, k) => {
                write_child(f, e, e.precedence() <= p)?;
                write!(f, "^{k}")
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                write_child(f, a, a.precedence() < p)?;
                f.write_str(op)?;
                write_child(f, b, b.precedence() <= p)
            }
        }
    }
}

pub(crate) fn expr(c: &mut Cursor) -> Result<Expr> {
    let mut lhs = term(c)?;
    loop {
        c.skip_inline_ws();
        if c.eat('+') {
            c.skip_inline_ws();
            lhs = Expr::Add(Box::new(lhs), Box::new(term(c)?));
        } else if c.peek() == Some('-') {
            c.bump();
            c.skip_inline_ws();
            lhs = Expr::Sub(Box::new(lhs), Box::new(term(c)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn term(c: &mut Cursor) -> Result<Expr> {
    let mut lhs = unary(c)?;
    loop {
        c.skip_inline_ws();
        if c.eat('*') {
            c.skip_inline_ws();
            lhs = Expr::Mul(Box::new(lhs), Box::new(unary(c)?));
        } else if c.eat('/') {
            c.skip_inline_ws();
            lhs = Expr::Div(Box::new(lhs), Box::new(unary(c)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn unary(c: &mut Cursor) -> Result<Expr> {
    c.skip_inline_ws();
    if c.eat('-') {
        return Ok(Expr::Neg(Box::new(unary(c)?)));
    }
    power(c)
}

fn power(c: &mut Cursor) -> Result<Expr> {
    let base = primary(c)?;
    c.skip_inline_ws();
    if c.eat('^') {
        c.skip_inline_ws();
        let d = c.digits()?;
        let e: u32 = d.parse().map_err(|_| c.error("exponent out of range"))?;
        return Ok(Expr::Pow(Box::new(base), e));
    }
    Ok(base)
}

fn primary(c: &mut Cursor) -> Result<Expr> {
    c.skip_inline_ws();
    match c.peek() {
        Some('(') => {
            c.bump();
            let e = expr(c)?;
            c.skip_inline_ws();
            c.expect(')')?;
            Ok(e)
        }
        Some(ch) if ch.is_ascii_digit() => {
            let d = c.digits()?;
            Ok(Expr::Int(d.parse().expect("digits")))
        }
        Some(ch) if ch.is_ascii_alphabetic() || ch == '_' => Ok(Expr::Var(c.ident()?)),
        Some(ch) => Err(c.error(format!("unexpected `{ch}` in expression"))),
        None => Err(c.error("unexpected end of expression")),
    }
}

/// Parse a complete expression.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut c = Cursor::new(src);
    let e = expr(&mut c)?;
    c.skip_ws();
    if !c.at_end() {
        return Err(c.error("trailing input after expression"));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..20).prop_map(|n| Expr::Int(n.into())),
            prop::sample::select(vec!["x1", "x2", "y1", "p1_1"]).prop_map(|s| Expr::Var(s.into())),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), 1u32..4).prop_map(|(e, k)| Expr::Pow(Box::new(e), k)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(e in arb_expr()) {
            let text = e.to_string();
            prop_assert_eq!(parse_expr(&text).unwrap(), e);
        }
    }

    #[test]
    fn precedence() {
        let e = parse_expr("1 - x1*y1^2 + -x2/3").unwrap();
        assert_eq!(e.to_string(), "1 - x1*y1^2 + -x2/3");
        assert_eq!(
            parse_expr("a - (b - c)").unwrap().to_string(),
            "a - (b - c)"
        );
        assert_eq!(parse_expr("(a - b) - c").unwrap().to_string(), "a - b - c");
    }

    #[test]
    fn syntax_error_position() {
        match parse_expr("x1 + * 2") {
            Err(Error::Syntax {
                line: 1, col: 6, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
