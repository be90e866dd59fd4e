//! Recursive-descent parser for rational functions in `x`.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/' | <juxtaposition>) factor)*
//! factor   := '-' factor | base ('^' nat)*
//! base     := '(' expr ')' | 'x' | rational
//! rational := int ('/' int)?
//! ```
//!
//! `a/b` with integer `b` is read as one rational literal, so `1/2^3` is
//! `(1/2)^3`. Exponent chains associate to the right. Juxtaposition
//! multiplies (`3x^2`).

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::poly::Poly;
use crate::ratfun::{RatFun, RatFunError};
use crate::scalar::FieldElem;

/// Largest accepted exponent.
pub const MAX_EXPONENT: u32 = 65_536;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at offset {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("zero denominator")]
    ZeroDenominator,
}

impl From<RatFunError> for ExprError {
    fn from(_: RatFunError) -> Self {
        ExprError::ZeroDenominator
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigUint),
    Rational(BigUint, BigUint),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Rational(a, b) => write!(f, "{a}/{b}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, expected: &str) -> Result<T, ExprError> {
        Err(ExprError::Parse { position: self.pos, expected: expected.to_string() })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(c) if c == b'(' || c == b'x' || c.is_ascii_digit() => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    /// `'^' nat ('^' nat)*`, folded from the right.
    fn exponent(&mut self) -> Result<u32, ExprError> {
        let mut chain = Vec::new();
        while self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let Some(n) = self.int() else { return self.err("a nonnegative integer exponent") };
            chain.push((at, n));
        }
        let too_big = |p: &mut Self, at: usize| {
            p.pos = at;
            p.err(&format!("an exponent at most {MAX_EXPONENT}"))
        };
        let (at, last) = chain.pop().expect("at least one exponent");
        let mut e = match u32::try_from(&last) {
            Ok(e) if e <= MAX_EXPONENT => e,
            _ => return too_big(self, at),
        };
        while let Some((at, n)) = chain.pop() {
            match u32::try_from(&n).ok().and_then(|b| b.checked_pow(e)) {
                Some(v) if v <= MAX_EXPONENT => e = v,
                _ => return too_big(self, at),
            }
        }
        Ok(e)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("`)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Some(c) if c.is_ascii_digit() => {
                let a = self.int().expect("digit present");
                // `a/b` is a literal only when an integer follows the slash
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    if let Some(b) = self.int() {
                        return Ok(Expr::Rational(a, b));
                    }
                }
                self.pos = save;
                Ok(Expr::Int(a))
            }
            _ => self.err("`(`, `x`, or a number"),
        }
    }

    fn int(&mut self) -> Option<BigUint> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).ok()?;
        digits.parse().ok()
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("an operator or end of input");
    }
    Ok(e)
}

fn constant<K: FieldElem>(n: &BigUint, ctx: &K::Ctx) -> K {
    K::parse_in(ctx, &n.to_string()).expect("decimal integers parse in every field")
}

impl Expr {
    pub fn lower<K: FieldElem>(&self, ctx: &K::Ctx) -> Result<RatFun<K>, ExprError> {
        let c = |k: K| RatFun::constant(k);
        Ok(match self {
            Expr::Int(n) => c(constant(n, ctx)),
            Expr::Rational(a, b) => {
                let inv = constant::<K>(b, ctx).inv().ok_or(ExprError::ZeroDenominator)?;
                c(constant::<K>(a, ctx) * inv)
            }
            Expr::X => RatFun::identity(ctx),
            Expr::Neg(e) => e.lower(ctx)?.neg(),
            Expr::Add(a, b) => a.lower(ctx)?.add(&b.lower(ctx)?)?,
            Expr::Sub(a, b) => a.lower(ctx)?.sub(&b.lower(ctx)?)?,
            Expr::Mul(a, b) => a.lower(ctx)?.mul(&b.lower(ctx)?)?,
            Expr::Div(a, b) => a.lower(ctx)?.div(&b.lower(ctx)?)?,
            Expr::Pow(a, e) => a.lower(ctx)?.pow(*e),
        })
    }
}

/// Parses and normalizes `src` over the field described by `ctx`.
pub fn parse_expression<K: FieldElem>(src: &str, ctx: &K::Ctx) -> Result<RatFun<K>, ExprError> {
    parse_expr(src)?.lower(ctx)
}

/// Parses a polynomial; non-polynomial input is rejected with a parse error
/// at offset 0.
pub fn parse_polynomial<K: FieldElem>(src: &str, ctx: &K::Ctx) -> Result<Poly<K>, ExprError> {
    parse_expression(src, ctx)?
        .as_polynomial()
        .ok_or(ExprError::Parse { position: 0, expected: "a polynomial".to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, PrimeModulus, Rational};

    fn q(src: &str) -> RatFun<Rational> {
        parse_expression(src, &()).unwrap()
    }

    fn qp(v: &[i64]) -> Poly<Rational> {
        Poly::from_i64s(v, &())
    }

    #[test]
    fn examples() {
        assert_eq!(q("x^2 - 2"), RatFun::from_poly(qp(&[-2, 0, 1])));
        let f = q("(x^2+1)/(x-1)");
        assert_eq!((f.num(), f.den()), (&qp(&[1, 0, 1]), &qp(&[-1, 1])));
        let f = q("1/(x/2)");
        assert_eq!((f.num(), f.den()), (&qp(&[2]), &qp(&[0, 1])));
    }

    #[test]
    fn negative_exponent_is_rejected() {
        assert_eq!(
            parse_expr("x^-1"),
            Err(ExprError::Parse { position: 2, expected: "a nonnegative integer exponent".into() })
        );
        assert!(matches!(parse_expr("x^70000"), Err(ExprError::Parse { position: 2, .. })));
    }

    #[test]
    fn precedence() {
        assert_eq!(q("-x^2"), RatFun::from_poly(qp(&[0, 0, -1])));
        assert_eq!(q("2^3^2"), RatFun::constant(Rational::from_integer(512.into())));
        assert!(matches!(parse_expr("x^2^17"), Err(ExprError::Parse { position: 2, .. })));
        assert_eq!(q("1/2^2"), RatFun::constant(Rational::new(1.into(), 4.into())));
        assert_eq!(q("x - 1 - 1"), RatFun::from_poly(qp(&[-2, 1])));
        assert_eq!(q("x^3-3x"), q("x^3 - 3*x"));
        assert_eq!(q("2(x+1)"), RatFun::from_poly(qp(&[2, 2])));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expr(""), Err(ExprError::Parse { position: 0, .. })));
        assert!(matches!(parse_expr("(x"), Err(ExprError::Parse { position: 2, .. })));
        assert!(matches!(parse_expr("x +"), Err(ExprError::Parse { position: 3, .. })));
        assert!(matches!(parse_expr("y"), Err(ExprError::Parse { position: 0, .. })));
        assert_eq!(parse_expression::<Rational>("1/0", &()), Err(ExprError::ZeroDenominator));
        assert_eq!(parse_expression::<Rational>("x/(x-x)", &()), Err(ExprError::ZeroDenominator));
        assert_eq!(parse_expression::<Fp>("1/3", &PrimeModulus(3)), Err(ExprError::ZeroDenominator));
    }

    #[test]
    fn finite_fields() {
        let ctx = PrimeModulus(3);
        let f = parse_expression::<Fp>("x^2 + 4x", &ctx).unwrap();
        assert_eq!(f.to_string(), "x^2 + x");
    }

    #[test]
    fn printed_forms_reparse() {
        for src in ["(x^2+1)/(x-1)", "x^2/2 - 1/3", "(3x+1)/(2x^2-5)", "-x^5/7", "1/(x/2)"] {
            let f = q(src);
            assert_eq!(q(&f.to_string()), f, "{src} -> {f}");
        }
    }
}
