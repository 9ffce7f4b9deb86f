//! Component expressions: a small arithmetic language over `u1..un`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' integer)*        right-associative, integer exponents
//! atom   := number | 'u' integer | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp'
//! ```

use std::fmt;

use thiserror::Error;

use crate::jet::{Elementary, Jet, JetError};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at column {}", .position + 1)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Zero-based variable index; printed as `u{index + 1}`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Elementary, Box<Expr>),
}

impl Expr {
    /// A literal; negative values are wrapped in `Neg` so that printing and
    /// re-parsing gives back the same tree.
    pub fn number(v: f64) -> Self {
        if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn var(index: usize) -> Self {
        Expr::Var(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, e: u32) -> Self {
        Expr::Pow(Box::new(a), e)
    }

    /// `u^alpha` as a left-associated product; the constant `1` for alpha = 0.
    pub fn monomial(exponents: &[u32]) -> Self {
        exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    Expr::Var(i)
                } else {
                    Expr::pow(Expr::Var(i), e)
                }
            })
            .reduce(Expr::mul)
            .unwrap_or(Expr::Num(1.0))
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    pub fn all_literals_finite(&self) -> bool {
        match self {
            Expr::Num(v) => v.is_finite(),
            Expr::Var(_) => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.all_literals_finite(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.all_literals_finite() && b.all_literals_finite()
            }
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => point[*i],
            Expr::Neg(a) => -a.eval(point),
            Expr::Add(a, b) => a.eval(point) + b.eval(point),
            Expr::Sub(a, b) => a.eval(point) - b.eval(point),
            Expr::Mul(a, b) => a.eval(point) * b.eval(point),
            Expr::Div(a, b) => a.eval(point) / b.eval(point),
            Expr::Pow(a, e) => a.eval(point).powi(*e as i32),
            Expr::Call(f, a) => f.eval(a.eval(point)),
        }
    }

    /// Evaluates in jet arithmetic with the variables bound to `vars`.
    pub fn eval_jet(&self, vars: &[Jet]) -> Result<Jet, JetError> {
        let proto = &vars[0];
        Ok(match self {
            Expr::Num(v) => Jet::constant(*v, proto.num_vars(), proto.order()),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Neg(a) => a.eval_jet(vars)?.neg(),
            Expr::Add(a, b) => a.eval_jet(vars)?.add(&b.eval_jet(vars)?)?,
            Expr::Sub(a, b) => a.eval_jet(vars)?.sub(&b.eval_jet(vars)?)?,
            Expr::Mul(a, b) => a.eval_jet(vars)?.mul(&b.eval_jet(vars)?)?,
            Expr::Div(a, b) => a.eval_jet(vars)?.div(&b.eval_jet(vars)?)?,
            Expr::Pow(a, e) => a.eval_jet(vars)?.powi(*e),
            Expr::Call(f, a) => a.eval_jet(vars)?.elementary(*f),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => 3,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lhs, op, rhs, prec) = match self {
            Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => return write!(f, "(-{})", -v),
            Expr::Num(v) => return write!(f, "{v}"),
            Expr::Var(i) => return write!(f, "u{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                return write_child(f, a, 3);
            }
            Expr::Pow(a, e) => {
                write_child(f, a, 5)?;
                return write!(f, "^{e}");
            }
            Expr::Call(func, a) => return write!(f, "{}({a})", func.name()),
            Expr::Add(a, b) => (a, " + ", b, 1),
            Expr::Sub(a, b) => (a, " - ", b, 1),
            Expr::Mul(a, b) => (a, "*", b, 2),
            Expr::Div(a, b) => (a, "/", b, 2),
        };
        write_child(f, lhs, prec)?;
        write!(f, "{op}")?;
        write_child(f, rhs, prec + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Int(u64),
    Var(usize),
    Func(Elementary),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str, num_vars: usize) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                i += 1;
                out.push((
                    start,
                    match c {
                        b'+' => Token::Plus,
                        b'-' => Token::Minus,
                        b'*' => Token::Star,
                        b'/' => Token::Slash,
                        b'^' => Token::Caret,
                        b'(' => Token::LParen,
                        _ => Token::RParen,
                    },
                ));
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut integral = true;
                if i < bytes.len() && bytes[i] == b'.' {
                    integral = false;
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
                        integral = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lexeme = &text[start..i];
                let token = if integral {
                    match lexeme.parse::<u64>() {
                        Ok(v) => Token::Int(v),
                        Err(_) => Token::Num(lexeme.parse::<f64>().map_err(|_| {
                            ParseError::new(start, format!("malformed number '{lexeme}'"))
                        })?),
                    }
                } else {
                    Token::Num(lexeme.parse::<f64>().map_err(|_| {
                        ParseError::new(start, format!("malformed number '{lexeme}'"))
                    })?)
                };
                out.push((start, token));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let token = match word {
                    "sin" => Token::Func(Elementary::Sin),
                    "cos" => Token::Func(Elementary::Cos),
                    "exp" => Token::Func(Elementary::Exp),
                    _ if word.len() > 1
                        && word.starts_with('u')
                        && word[1..].bytes().all(|b| b.is_ascii_digit()) =>
                    {
                        let index: usize = word[1..].parse().map_err(|_| {
                            ParseError::new(start, format!("bad variable '{word}'"))
                        })?;
                        if index == 0 || index > num_vars {
                            return Err(ParseError::new(
                                start,
                                format!(
                                    "variable index out of range: '{word}' with {num_vars} variable(s)"
                                ),
                            ));
                        }
                        Token::Var(index - 1)
                    }
                    _ => {
                        return Err(ParseError::new(
                            start,
                            format!("unknown identifier '{word}'"),
                        ))
                    }
                };
                out.push((start, token));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(
                    start,
                    format!("unexpected character '{ch}'"),
                ));
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        let at = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(ParseError::new(at, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        Ok(Expr::pow(base, e))
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let at = self.offset();
        let base = match self.next() {
            Some(Token::Int(v)) => v,
            Some(Token::Num(_)) => {
                return Err(ParseError::new(
                    at,
                    "exponent must be a non-negative integer",
                ))
            }
            Some(Token::Minus) => {
                return Err(ParseError::new(at, "negative exponents are not allowed"))
            }
            _ => return Err(ParseError::new(at, "expected an integer exponent")),
        };
        let value = if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let upper = self.exponent()?;
            base.checked_pow(upper)
        } else {
            Some(base)
        };
        value
            .and_then(|v| u32::try_from(v).ok())
            .ok_or_else(|| ParseError::new(at, "exponent too large"))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Int(v)) => Ok(Expr::Num(v as f64)),
            Some(Token::Var(i)) => Ok(Expr::Var(i)),
            Some(Token::Func(f)) => {
                self.expect(Token::LParen, "'(' after function name")?;
                let arg = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(_) => Err(ParseError::new(at, "unexpected token")),
            None => Err(ParseError::new(at, "unexpected end of expression")),
        }
    }
}

/// Parses a component expression in `num_vars` variables.
pub fn parse_expression(text: &str, num_vars: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(text, num_vars)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(ParseError::new(
            parser.offset(),
            "unexpected trailing input",
        ));
    }
    Ok(expr)
}
