//! Text syntax for polynomials and rational functions:
//! `a5*(a6^2+a7^2)`, `-alpha`, `1/2`, `beta/alpha`.

use num_bigint::BigInt;

use super::{Poly, RatFunc, Rational, RingError, Var};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

/// Tokens paired with their byte offset in the source.
pub(crate) fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, RingError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(RingError::Parse { offset: start, message: format!("unexpected character '{c}'") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, F> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
    resolve: &'a F,
}

impl<F: Fn(&str) -> Result<Var, RingError>> Parser<'_, F> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(o, _)| *o)
    }

    fn err(&self, msg: &str) -> RingError {
        RingError::Parse { offset: self.offset(), message: msg.to_string() }
    }

    fn expr(&mut self) -> Result<RatFunc, RingError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, RingError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(RingError::DivisionByZero);
                    }
                    acc = &acc / &d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, RingError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc, RingError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Num(n)) => u32::try_from(n.clone()).map_err(|_| self.err("exponent too large"))?,
                _ => return Err(self.err("expected integer exponent")),
            };
            self.pos += 1;
            let mut acc = RatFunc::one();
            for _ in 0..e {
                acc = &acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, RingError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RatFunc::constant(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                let v = (self.resolve)(&name).map_err(|e| match e {
                    RingError::Parse { message, .. } => RingError::Parse { offset: self.offset(), message },
                    other => other,
                })?;
                self.pos += 1;
                Ok(RatFunc::from_poly(Poly::var(v)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => Err(self.err("unexpected token")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// The default identifier rule: coefficient spellings (`a3`, `a1_2`, `x4`)
/// are form coefficients, everything else is a parameter.
pub fn default_resolver(name: &str) -> Result<Var, RingError> {
    if Var::looks_like_coefficient(name) {
        Ok(Var::coef(name))
    } else {
        Ok(Var::param(name))
    }
}

/// Parses a rational function with a custom identifier resolver.
pub fn parse_ratfunc_with<F>(src: &str, resolve: &F) -> Result<RatFunc, RingError>
where
    F: Fn(&str) -> Result<Var, RingError>,
{
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, len: src.len(), resolve };
    if p.peek().is_none() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

pub fn parse_ratfunc(src: &str) -> Result<RatFunc, RingError> {
    parse_ratfunc_with(src, &default_resolver)
}

pub fn parse_poly_with<F>(src: &str, resolve: &F) -> Result<Poly, RingError>
where
    F: Fn(&str) -> Result<Var, RingError>,
{
    let f = parse_ratfunc_with(src, resolve)?;
    match f.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(RingError::Parse { offset: 0, message: format!("'{src}' is not a polynomial") }),
    }
}

pub fn parse_poly(src: &str) -> Result<Poly, RingError> {
    parse_poly_with(src, &default_resolver)
}

pub fn parse_rational(src: &str) -> Result<Rational, RingError> {
    parse_ratfunc_with(src, &|n: &str| {
        Err(RingError::Parse { offset: 0, message: format!("'{n}' in a rational constant") })
    })?
    .constant_value()
    .ok_or_else(|| RingError::Parse { offset: 0, message: format!("'{src}' is not a rational number") })
}
