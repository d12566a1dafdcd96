//! Infix expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?          exponent must fold to a rational
//! atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//! ident   := x | y | p | <declared parameter>
//!          | y' | y''                   equation mode only
//! func    := exp | ln | sqrt | root5
//! number  := digits ('.' digits)?
//! ```
//!
//! `3/5` is ordinary division and folds to an exact rational; decimals are read
//! exactly when the result fits in 64 bits.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Expr, Func, Node, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at offset {offset} is not a rational constant")]
    NonConstantExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NonConstantExponent { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Names accepted as parameters.
    pub params: BTreeSet<String>,
    /// Accept `y'` and `y''` (equation mode).
    pub primes: bool,
}

impl ParseOptions {
    pub fn with_params<I, S>(params: I) -> ParseOptions
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ParseOptions {
            params: params.into_iter().map(Into::into).collect(),
            primes: false,
        }
    }
}

/// A parsed `lhs = rhs` equation.
#[derive(Debug, Clone)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, opts)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses `lhs = rhs` in equation mode (primes allowed).
pub fn parse_equation(text: &str, params: &BTreeSet<String>) -> Result<Equation, ParseError> {
    let opts = ParseOptions {
        params: params.clone(),
        primes: true,
    };
    let mut p = Parser::new(text, &opts)?;
    let lhs = p.expr()?;
    match p.peek() {
        Tok::Eq => p.bump(),
        _ => return Err(p.unexpected("expected `=`")),
    }
    let rhs = p.expr()?;
    p.expect_end()?;
    Ok(Equation { lhs, rhs })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Expr),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Prime,
    Eq,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(e) => format!("number `{e}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Prime => "`'`".into(),
        Tok::Eq => "`=`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'\'' => Tok::Prime,
            b'=' => Tok::Eq,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                out.push((Tok::Num(number(&text[start..i], start)?), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn number(s: &str, offset: usize) -> Result<Expr, ParseError> {
    let bad = || ParseError::Syntax {
        offset,
        message: format!("malformed number `{s}`"),
    };
    let (int_part, frac_part) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if (int_part.is_empty() && frac_part.is_empty()) || frac_part.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let exact = digits.parse::<i64>().ok().and_then(|n| {
        let den = 10i64.checked_pow(frac_part.len() as u32)?;
        Some(Rational::new(n, den))
    });
    match exact {
        Some(r) => Ok(Expr::constant(r)),
        None => s.parse::<f64>().map(Expr::real).map_err(|_| bad()),
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    opts: &'a ParseOptions,
}

impl<'a> Parser<'a> {
    fn new(text: &str, opts: &'a ParseOptions) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            opts,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("{what}, found {}", describe(self.peek())),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => Err(self.unexpected("expected operator or end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs * self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exp = self.unary()?;
        match exp.node() {
            Node::Const(r) => Ok(Expr::pow(base, *r)),
            _ => Err(ParseError::NonConstantExponent { offset: at }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(e) => {
                self.bump();
                Ok(e)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("expected `)`"));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(self.unexpected(&format!("expected `(` after `{name}`")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return Err(self.unexpected("expected `)`"));
                    }
                    self.bump();
                    return Ok(Expr::func(func, arg));
                }
                match name.as_str() {
                    "x" => Ok(Expr::x()),
                    "p" => Ok(Expr::p()),
                    "y" => self.primes_after_y(),
                    _ if self.opts.params.contains(&name) => Ok(Expr::param(&name)),
                    _ => Err(ParseError::UnknownIdentifier { offset: at, name }),
                }
            }
            _ => Err(self.unexpected("expected an operand")),
        }
    }

    fn primes_after_y(&mut self) -> Result<Expr, ParseError> {
        let mut primes = 0;
        while *self.peek() == Tok::Prime {
            if !self.opts.primes {
                return Err(self.unexpected("derivative marks are only allowed in equations"));
            }
            if primes == 2 {
                return Err(self.unexpected("derivatives above y'' are not supported"));
            }
            primes += 1;
            self.bump();
        }
        Ok(match primes {
            0 => Expr::y(),
            1 => Expr::p(),
            _ => Expr::var(Var::Ypp),
        })
    }
}
