//! Exact coefficient arithmetic: rationals, sparse multivariate polynomials
//! and reduced rational functions over named indeterminates.

mod gcd;
mod parse;
mod poly;
mod ratfunc;
mod var;

use std::collections::BTreeMap;

use thiserror::Error;

pub use gcd::{content_in, gcd, lcm, radical, split_factors};
pub use parse::{default_resolver, parse_poly, parse_poly_with, parse_ratfunc, parse_ratfunc_with, parse_rational};
pub(crate) use parse::{tokenize, Tok};
pub use poly::{Monomial, Poly};
pub use ratfunc::RatFunc;
pub use var::{Var, VarKind};

/// Arbitrary-precision rational; always stored reduced with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("unknown indeterminate '{0}'")]
    UnknownIndeterminate(String),
    #[error("indeterminate '{0}' declared twice")]
    DuplicateIndeterminate(String),
    #[error("unbound indeterminates: {0}")]
    UnboundIndeterminate(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// `n / d` as a rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// The declared indeterminates of one computation.
#[derive(Clone, Debug, Default)]
pub struct RingContext {
    vars: BTreeMap<String, Var>,
}

/// Result of a possibly partial evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Evaluated {
    Value(Rational),
    Poly(Poly),
}

impl RingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, kind: VarKind) -> Result<Var, RingError> {
        if self.vars.contains_key(name) {
            return Err(RingError::DuplicateIndeterminate(name.to_string()));
        }
        let v = Var::new(name, kind);
        self.vars.insert(name.to_string(), v.clone());
        Ok(v)
    }

    pub fn lookup(&self, name: &str) -> Result<Var, RingError> {
        self.vars
            .get(name)
            .cloned()
            .ok_or_else(|| RingError::UnknownIndeterminate(name.to_string()))
    }

    pub fn parse_poly(&self, src: &str) -> Result<Poly, RingError> {
        parse_poly_with(src, &|n: &str| self.lookup(n))
    }

    /// Substitutes the given values; a full binding yields a rational.
    pub fn evaluate(&self, p: &Poly, bindings: &[(&str, Rational)]) -> Result<Evaluated, RingError> {
        let mut map = BTreeMap::new();
        for (name, val) in bindings {
            map.insert(self.lookup(name)?, val.clone());
        }
        let out = p.evaluate(&map);
        Ok(match out.constant_value() {
            Some(c) => Evaluated::Value(c),
            None => Evaluated::Poly(out),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(names: &[&str]) -> RingContext {
        let mut c = RingContext::new();
        for n in names {
            let kind = if Var::looks_like_coefficient(n) { VarKind::FormCoefficient } else { VarKind::Parameter };
            c.declare(n, kind).unwrap();
        }
        c
    }

    #[test]
    fn evaluate_examples() {
        let c = ctx(&["alpha", "beta", "gamma", "delta", "a1", "a4", "a5"]);
        let p = c.parse_poly("alpha*beta - 1").unwrap();
        assert_eq!(c.evaluate(&p, &[("alpha", rat(2, 1)), ("beta", rat(1, 2))]).unwrap(), Evaluated::Value(rat(0, 1)));
        let q = c.parse_poly("gamma^2 + delta^2").unwrap();
        assert_eq!(c.evaluate(&q, &[("gamma", rat(0, 1)), ("delta", rat(0, 1))]).unwrap(), Evaluated::Value(rat(0, 1)));
        let m = c.parse_poly("a1*a4*a5").unwrap();
        assert_eq!(
            c.evaluate(&m, &[("a1", rat(1, 1)), ("a4", rat(2, 1)), ("a5", rat(3, 1))]).unwrap(),
            Evaluated::Value(rat(6, 1))
        );
        match c.evaluate(&m, &[("a1", rat(2, 1))]).unwrap() {
            Evaluated::Poly(r) => assert_eq!(r.to_string(), "2*a4*a5"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_binding_is_an_error() {
        let c = ctx(&["alpha"]);
        let p = c.parse_poly("alpha").unwrap();
        assert_eq!(
            c.evaluate(&p, &[("zeta", rat(1, 1))]),
            Err(RingError::UnknownIndeterminate("zeta".into()))
        );
        assert!(c.parse_poly("alpha + zeta").is_err());
    }

    #[test]
    fn identity_test_examples() {
        let sum = &parse_poly("alpha + gamma").unwrap() - &parse_poly("gamma + alpha").unwrap();
        assert!(sum.is_zero());
        assert!(!parse_poly("a5*(a6^2+a7^2)").unwrap().is_zero());
    }
}
