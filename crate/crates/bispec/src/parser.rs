//! Surface syntax for operators and scalars, plus the canonical printer.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr     := ["-"] term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := base ("^" uint)?
//! base     := integer | "i" | identifier | "(" expr ")"
//! ```
//!
//! Division is only defined when the divisor evaluates to an order-zero
//! operator (a function); this is what makes printed forms like
//! `(-1)/(x^2)*Dx` round-trip. Named parameters are substituted at parse
//! time, so a parsed tree contains only exact scalars and the dialect's
//! reserved symbols.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::{scalar_monomial_string, G, Poly, RatFunc, Var};
use crate::orealg::OreOp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound parameter `{name}` at position {pos}")]
    UnboundParameter { name: String, pos: usize },
    #[error("reserved symbol `{name}` misused at position {pos}")]
    ReservedSymbolMisuse { name: String, pos: usize },
    #[error("division by an operator of positive order")]
    OperatorDivision,
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression is not a scalar")]
    NotAScalar,
}

/// Which reserved symbols an expression may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    /// `x`, `Dx`
    RawX,
    /// `y`, `Dy`
    RawY,
    /// Bessel generator words: `BB` (the base operator), `S` (x·Dx), `X2` (x²)
    BesselGenerators,
    /// scalars only (endpoints, parameter values)
    Scalar,
}

impl Dialect {
    fn reserved(self) -> &'static [&'static str] {
        match self {
            Dialect::RawX => &["x", "Dx"],
            Dialect::RawY => &["y", "Dy"],
            Dialect::BesselGenerators => &["BB", "S", "X2"],
            Dialect::Scalar => &[],
        }
    }
}

const ALL_RESERVED: &[&str] = &["x", "Dx", "y", "Dy", "BB", "S", "X2", "i"];

/// Named Gaussian-rational parameter bindings.
#[derive(Debug, Clone, Default)]
pub struct ParamEnv {
    map: BTreeMap<String, G>,
}

impl ParamEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: &str, value: G) -> Result<(), ParseError> {
        if ALL_RESERVED.contains(&name) {
            return Err(ParseError::ReservedSymbolMisuse {
                name: name.to_string(),
                pos: 0,
            });
        }
        self.map.insert(name.to_string(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&G> {
        self.map.get(name)
    }
}

/// Expression tree with parameters already substituted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, u32),
    /// Multiplicative inverse of an order-zero subexpression (from `/`).
    Recip(Box<Expr>),
    Scalar(G),
    Symbol(String),
}

impl Expr {
    pub fn scalar_int(n: i64) -> Expr {
        Expr::Scalar(G::from_int(n))
    }

    /// Evaluates the tree to an operator, resolving each reserved symbol
    /// through `images`. With `reversed = true` every product is evaluated
    /// in the opposite order (the shape of an anti-homomorphism).
    pub fn eval_op(
        &self,
        var: Var,
        images: &BTreeMap<String, OreOp>,
        reversed: bool,
    ) -> Result<OreOp, ParseError> {
        match self {
            Expr::Scalar(c) => Ok(OreOp::constant(var, c.clone())),
            Expr::Symbol(name) => images.get(name).cloned().ok_or_else(|| {
                ParseError::ReservedSymbolMisuse {
                    name: name.clone(),
                    pos: 0,
                }
            }),
            Expr::Sum(parts) => {
                let mut acc = OreOp::zero(var);
                for p in parts {
                    acc = acc.add(&p.eval_op(var, images, reversed)?);
                }
                Ok(acc)
            }
            Expr::Prod(parts) => {
                let mut acc = OreOp::one(var);
                if reversed {
                    for p in parts.iter().rev() {
                        acc = acc.mul(&p.eval_op(var, images, reversed)?);
                    }
                } else {
                    for p in parts {
                        acc = acc.mul(&p.eval_op(var, images, reversed)?);
                    }
                }
                Ok(acc)
            }
            Expr::Pow(base, e) => Ok(base.eval_op(var, images, reversed)?.pow(*e as usize)),
            Expr::Recip(inner) => {
                let op = inner.eval_op(var, images, reversed)?;
                if op.is_zero() {
                    return Err(ParseError::DivisionByZero);
                }
                if op.order() != Some(0) {
                    return Err(ParseError::OperatorDivision);
                }
                let f = op.coeff(0);
                Ok(OreOp::from_ratfunc(
                    RatFunc::one(var).div(&f).map_err(|_| ParseError::DivisionByZero)?,
                ))
            }
            }
    }

    /// Evaluates a parameter-free, symbol-free tree to a scalar.
    pub fn eval_scalar(&self) -> Result<G, ParseError> {
        let op = self.eval_op(Var::X, &BTreeMap::new(), false)?;
        if op.is_zero() {
            return Ok(G::zero());
        }
        op.coeff(0)
            .constant_value()
            .filter(|_| op.order() == Some(0))
            .ok_or(ParseError::NotAScalar)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = vec![];
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => pos += 1,
            '+' => {
                toks.push((Tok::Plus, pos));
                pos += 1;
            }
            '-' => {
                toks.push((Tok::Minus, pos));
                pos += 1;
            }
            '*' => {
                toks.push((Tok::Star, pos));
                pos += 1;
            }
            '/' => {
                toks.push((Tok::Slash, pos));
                pos += 1;
            }
            '^' => {
                toks.push((Tok::Caret, pos));
                pos += 1;
            }
            '(' => {
                toks.push((Tok::LParen, pos));
                pos += 1;
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                pos += 1;
            }
            '0'..='9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let n: BigInt = text[start..pos].parse().unwrap();
                toks.push((Tok::Int(n), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                toks.push((Tok::Ident(text[start..pos].to_string()), start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character `{}`", c),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    dialect: Dialect,
    env: &'a ParamEnv,
    text_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks
            .get(self.idx)
            .map(|(_, p)| *p)
            .unwrap_or(self.text_len)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.idx += 1;
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos(),
                msg: format!("expected {}", what),
            })
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut parts = vec![];
        let negate_first = if self.peek() == Some(&Tok::Minus) {
            self.idx += 1;
            true
        } else {
            false
        };
        let first = self.parse_term()?;
        parts.push(if negate_first {
            Expr::Prod(vec![Expr::scalar_int(-1), first])
        } else {
            first
        });
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    parts.push(self.parse_term()?);
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    let t = self.parse_term()?;
                    parts.push(Expr::Prod(vec![Expr::scalar_int(-1), t]));
                }
                _ => break,
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Sum(parts)
        })
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut parts = vec![self.parse_factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.idx += 1;
                    parts.push(self.parse_factor()?);
                }
                Some(Tok::Slash) => {
                    self.idx += 1;
                    let f = self.parse_factor()?;
                    parts.push(Expr::Recip(Box::new(f)));
                }
                _ => break,
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Prod(parts)
        })
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.idx += 1;
            let pos = self.pos();
            match self.advance() {
                Some(Tok::Int(n)) => {
                    let e: u32 = n.try_into().map_err(|_| ParseError::Syntax {
                        pos,
                        msg: "exponent out of range".to_string(),
                    })?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(ParseError::Syntax {
                    pos,
                    msg: "expected nonnegative integer exponent".to_string(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn parse_base(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.advance() {
            Some(Tok::Int(n)) => Ok(Expr::Scalar(G::from_rational(BigRational::from_integer(n)))),
            Some(Tok::Ident(name)) => {
                if name == "i" {
                    return Ok(Expr::Scalar(G::i()));
                }
                if self.dialect.reserved().contains(&name.as_str()) {
                    return Ok(Expr::Symbol(name));
                }
                if let Some(v) = self.env.get(&name) {
                    return Ok(Expr::Scalar(v.clone()));
                }
                if ALL_RESERVED.contains(&name.as_str()) {
                    Err(ParseError::ReservedSymbolMisuse { name, pos })
                } else {
                    Err(ParseError::UnboundParameter { name, pos })
                }
            }
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected a number, symbol, or `(`".to_string(),
            }),
        }
    }
}

/// Parses `text` in the given dialect, substituting parameters from `env`.
pub fn parse(text: &str, dialect: Dialect, env: &ParamEnv) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        dialect,
        env,
        text_len: text.len(),
    };
    let e = p.parse_expr()?;
    if p.idx != p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: "unexpected trailing input".to_string(),
        });
    }
    Ok(e)
}

/// Parses an operator in the raw dialect of `var` directly to an `OreOp`.
pub fn parse_raw_op(text: &str, var: Var, env: &ParamEnv) -> Result<OreOp, ParseError> {
    let dialect = match var {
        Var::X => Dialect::RawX,
        Var::Y => Dialect::RawY,
    };
    let e = parse(text, dialect, env)?;
    let mut images = BTreeMap::new();
    images.insert(
        var.name().to_string(),
        OreOp::from_poly(Poly::var_poly(var)),
    );
    images.insert(var.d_name().to_string(), OreOp::d(var));
    e.eval_op(var, &images, false)
}

/// Parses a scalar literal/expression (e.g. `-1/2`, `i`, `3*i/4`).
pub fn parse_scalar(text: &str, env: &ParamEnv) -> Result<G, ParseError> {
    let e = parse(text, Dialect::Scalar, env)?;
    e.eval_scalar()
}

/// Parses a polynomial in `var` (operator syntax without the derivative
/// symbol); errors if the result has positive order or a denominator.
pub fn parse_poly(text: &str, var: Var, env: &ParamEnv) -> Result<Poly, ParseError> {
    let op = parse_raw_op(text, var, env)?;
    if op.is_zero() {
        return Ok(Poly::zero(var));
    }
    if op.order() != Some(0) {
        return Err(ParseError::NotAScalar);
    }
    op.coeff(0)
        .as_polynomial()
        .cloned()
        .ok_or(ParseError::NotAScalar)
}

fn coeff_term_string(c: &RatFunc, var: Var, j: usize) -> String {
    let d_pow = match j {
        0 => String::new(),
        1 => var.d_name().to_string(),
        _ => format!("{}^{}", var.d_name(), j),
    };
    if let Some(p) = c.as_polynomial() {
        let nonzero = p.coeffs().iter().filter(|a| !a.is_zero()).count();
        if nonzero == 1 {
            // single monomial: a*x^k
            let k = p.degree().unwrap();
            let lead = p.leading_coeff();
            let mut mono = scalar_monomial_string(&lead, var.name(), k);
            if j > 0 && k == 0 && !lead.re.is_zero() && !lead.im.is_zero() {
                // mixed complex scalar: parenthesize before `*Dx^j`
                mono = format!("({})", mono);
            }
            return if j == 0 {
                mono
            } else if mono == "1" {
                d_pow
            } else if mono == "-1" {
                format!("-{}", d_pow)
            } else {
                format!("{}*{}", mono, d_pow)
            };
        }
        let wrapped = format!("({})", p);
        return if j == 0 {
            wrapped
        } else {
            format!("{}*{}", wrapped, d_pow)
        };
    }
    let frac = format!("({})/({})", c.num(), c.den());
    if j == 0 {
        frac
    } else {
        format!("{}*{}", frac, d_pow)
    }
}

/// Canonical deterministic rendering: terms in descending derivative order;
/// re-parsing the output reproduces the operator exactly.
pub fn print_op(d: &OreOp) -> String {
    if d.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for j in (0..=d.order().unwrap()).rev() {
        let c = d.coeff(j);
        if c.is_zero() {
            continue;
        }
        let term = coeff_term_string(&c, d.var, j);
        if out.is_empty() {
            out.push_str(&term);
        } else if let Some(stripped) = term.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(stripped);
        } else {
            out.push_str(" + ");
            out.push_str(&term);
        }
    }
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Scalar(c) => write!(f, "{}", c),
            Expr::Symbol(s) => write!(f, "{}", s),
            Expr::Sum(parts) => {
                let strs: Vec<String> = parts.iter().map(|p| format!("{}", p)).collect();
                write!(f, "({})", strs.join(" + "))
            }
            Expr::Prod(parts) => {
                let strs: Vec<String> = parts.iter().map(|p| format!("{}", p)).collect();
                write!(f, "{}", strs.join("*"))
            }
            Expr::Pow(b, e) => write!(f, "({})^{}", b, e),
            Expr::Recip(b) => write!(f, "1/({})", b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env_with(pairs: &[(&str, G)]) -> ParamEnv {
        let mut env = ParamEnv::new();
        for (n, v) in pairs {
            env.bind(n, v.clone()).unwrap();
        }
        env
    }

    #[test]
    fn parse_prolate_expression() {
        let env = env_with(&[("t", G::from_int(1)), ("s", G::from_int(1))]);
        let op = parse_raw_op("(x^2 - t^2)*Dx^2 + 2*x*Dx + s^2*x^2", Var::X, &env).unwrap();
        assert_eq!(op.order(), Some(2));
        assert_eq!(
            op.coeff(2),
            RatFunc::from_poly(Poly::from_ints(Var::X, &[-1, 0, 1]))
        );
        assert_eq!(
            op.coeff(0),
            RatFunc::from_poly(Poly::from_ints(Var::X, &[0, 0, 1]))
        );
    }

    #[test]
    fn commutator_evaluates_to_one() {
        let env = ParamEnv::new();
        let op = parse_raw_op("Dx*x - x*Dx", Var::X, &env).unwrap();
        assert_eq!(op, OreOp::one(Var::X));
    }

    #[test]
    fn unbound_parameter_reported() {
        let env = ParamEnv::new();
        let err = parse("S^2*BB + q", Dialect::BesselGenerators, &env).unwrap_err();
        assert!(matches!(err, ParseError::UnboundParameter { ref name, .. } if name == "q"));
    }

    #[test]
    fn reserved_misuse_reported() {
        let env = ParamEnv::new();
        let err = parse("y + 1", Dialect::RawX, &env).unwrap_err();
        assert!(matches!(err, ParseError::ReservedSymbolMisuse { ref name, .. } if name == "y"));
    }

    #[test]
    fn scalar_literals() {
        let env = ParamEnv::new();
        assert_eq!(parse_scalar("-1/2", &env).unwrap(), G::from_frac(-1, 2));
        assert_eq!(parse_scalar("i", &env).unwrap(), G::i());
        assert_eq!(
            parse_scalar("1/2 + 3/4*i", &env).unwrap(),
            &G::from_frac(1, 2) + &(&G::from_frac(3, 4) * &G::i())
        );
    }

    #[test]
    fn print_examples() {
        let env = ParamEnv::new();
        let op = parse_raw_op("x*Dx + 1", Var::X, &env).unwrap();
        assert_eq!(print_op(&op), "x*Dx + 1");
        let op = parse_raw_op("-1/(x^2)", Var::X, &env).unwrap();
        assert_eq!(print_op(&op), "(-1)/(x^2)");
    }

    #[test]
    fn roundtrip_corpus() {
        let env = env_with(&[("t", G::from_frac(3, 2))]);
        let corpus = [
            "x*Dx + 1",
            "(x^2 - 1)*Dx^2 + 2*x*Dx + x^2",
            "Dx^3 - x*Dx",
            "1/(x^2)*Dx - 5",
            "(1/2)*x^4*Dx^2",
            "i*x*Dx",
            "(1 + 2*i)*Dx^2 - t",
            "x^2/(x^2-1)*Dx",
            "-Dx^2 + x",
            "0",
        ];
        for text in corpus {
            let op = parse_raw_op(text, Var::X, &env).unwrap();
            let printed = print_op(&op);
            let reparsed = parse_raw_op(&printed, Var::X, &env).unwrap();
            assert_eq!(reparsed, op, "roundtrip failed for `{}` → `{}`", text, printed);
            // printing is idempotent
            assert_eq!(print_op(&reparsed), printed);
        }
    }

    #[test]
    fn syntax_error_position() {
        let env = ParamEnv::new();
        let err = parse("x + ", Dialect::RawX, &env).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { pos: 4, .. }));
    }
}
