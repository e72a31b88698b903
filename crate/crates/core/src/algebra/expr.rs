//! Form expressions: `a5*(w1^w4) - a6*(w2^w3)`, `alpha*(w1^e1)`,
//! `a1*d(e1) + a5*(e2^e3)`.
//!
//! `^` between forms is the wedge product and `^<integer>` after a scalar is a
//! power. `*` multiplies (wedge when both sides have positive grade). `d(...)`
//! applies the exterior differential of the surrounding algebra.

use crate::exterior::{BasisNames, Form};
use crate::ring::{tokenize, RatFunc, RingError, Tok, Var};

/// Where identifiers and `d(...)` get their meaning.
pub trait FormScope {
    fn dim(&self) -> usize;
    fn names(&self) -> BasisNames;
    fn resolve_scalar(&self, name: &str) -> Result<Var, String>;
    fn differential(&self, f: &Form) -> Result<Form, String>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

struct P<'a, S: FormScope + ?Sized> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    scope: &'a S,
}

impl<S: FormScope + ?Sized> P<'_, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        let offset = self.toks.get(self.pos).map_or(self.end, |(o, _)| *o);
        Err(ExprError { offset, message: msg.into() })
    }

    fn lift<T, E: std::fmt::Display>(&self, r: Result<T, E>) -> Result<T, ExprError> {
        match r {
            Ok(v) => Ok(v),
            Err(e) => self.err(e.to_string()),
        }
    }

    fn scalar(&self, c: RatFunc) -> Form {
        Form::scalar(self.scope.dim(), c)
    }

    fn expr(&mut self) -> Result<Form, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = self.lift(acc.add(&t))?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = self.lift(acc.sub(&t))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Form, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.unary()?;
                    acc = self.lift(acc.wedge(&f))?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let f = self.unary()?;
                    let c = match scalar_of(&f) {
                        Some(c) if !c.is_zero() => c,
                        _ => return self.err("division by a non-scalar or zero"),
                    };
                    let inv = self.lift(c.recip())?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Form, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.wedge_chain(),
        }
    }

    fn wedge_chain(&mut self) -> Result<Form, ExprError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            if let Some(Tok::Num(n)) = self.peek().cloned() {
                let Some(c) = scalar_of(&acc) else {
                    return self.err("integer power of a form of positive grade");
                };
                let e = self.lift(u32::try_from(n).map_err(|_| "exponent too large"))?;
                self.pos += 1;
                let mut p = RatFunc::one();
                for _ in 0..e {
                    p = &p * &c;
                }
                acc = self.scalar(p);
            } else {
                let f = self.atom()?;
                acc = self.lift(acc.wedge(&f))?;
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Form, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.scalar(RatFunc::constant(n.into())))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if name == "d" && self.peek_at(1) == Some(&Tok::LParen) {
                    self.pos += 2;
                    let inner = self.expr()?;
                    if self.peek() != Some(&Tok::RParen) {
                        return self.err("expected ')' after d(...)");
                    }
                    let out = self.lift(self.scope.differential(&inner))?;
                    self.pos += 1;
                    return Ok(out);
                }
                if let Some(i) = basis_label(&name) {
                    let idx = match self.scope.names().index_of(&name) {
                        Some(k) if k <= self.scope.dim() => k,
                        _ => {
                            return self.err(format!(
                                "basis form '{name}' (index {i}) out of range for dimension {}",
                                self.scope.dim()
                            ))
                        }
                    };
                    self.pos += 1;
                    return self.lift(Form::basis(self.scope.dim(), idx));
                }
                let v = self.lift(self.scope.resolve_scalar(&name))?;
                self.pos += 1;
                Ok(self.scalar(RatFunc::from_poly(crate::ring::Poly::var(v))))
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// `w<k>` / `e<k>` spellings.
fn basis_label(name: &str) -> Option<usize> {
    let (h, rest) = name.split_at(1);
    if (h == "w" || h == "e") && !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
        rest.parse().ok()
    } else {
        None
    }
}

fn scalar_of(f: &Form) -> Option<RatFunc> {
    if f.is_zero() {
        return Some(RatFunc::zero());
    }
    if f.is_homogeneous(0) {
        return Some(f.coefficient(&[]));
    }
    None
}

pub fn parse_form<S: FormScope + ?Sized>(src: &str, scope: &S) -> Result<Form, ExprError> {
    let toks = tokenize(src).map_err(|e| match e {
        RingError::Parse { offset, message } => ExprError { offset, message },
        other => ExprError { offset: 0, message: other.to_string() },
    })?;
    let mut p = P { toks, pos: 0, end: src.len(), scope };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let f = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// A scope without a differential: any non-basis identifier is a scalar
/// indeterminate named by the default rule.
pub struct PlainScope {
    pub dim: usize,
    pub names: BasisNames,
}

impl FormScope for PlainScope {
    fn dim(&self) -> usize {
        self.dim
    }
    fn names(&self) -> BasisNames {
        self.names
    }
    fn resolve_scalar(&self, name: &str) -> Result<Var, String> {
        crate::ring::default_resolver(name).map_err(|e| e.to_string())
    }
    fn differential(&self, _f: &Form) -> Result<Form, String> {
        Err("d(...) needs an algebra".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(dim: usize) -> PlainScope {
        PlainScope { dim, names: BasisNames::Omega }
    }

    #[test]
    fn wedge_and_power() {
        let f = parse_form("a5*(w1^w4) - a6*(w2^w3)", &plain(6)).unwrap();
        assert_eq!(f.to_string(), "a5*(w1^w4) - a6*(w2^w3)");
        let g = parse_form("a6^2*(w1^w2)", &plain(2)).unwrap();
        assert_eq!(g.to_string(), "a6^2*(w1^w2)");
        let h = parse_form("w2^w1", &plain(2)).unwrap();
        assert_eq!(h.to_string(), "-(w1^w2)");
    }

    #[test]
    fn mixed_names() {
        let s = PlainScope { dim: 6, names: BasisNames::Nilradical(4) };
        let f = parse_form("e3^w2", &s).unwrap();
        assert_eq!(f.coefficient(&[3, 6]), RatFunc::one());
        assert_eq!(f.display_with(BasisNames::Nilradical(4)), "(e3^w2)");
    }

    #[test]
    fn out_of_range_and_d_without_algebra() {
        assert!(parse_form("w7", &plain(6)).is_err());
        assert!(parse_form("d(w1)", &plain(3)).is_err());
        assert!(parse_form("w1^2", &plain(3)).is_err());
    }
}
