use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::{Poly, Rational, RingError, Var};

/// Reduced quotient of polynomials.
///
/// Canonical form: `gcd(num, den) = 1`, `den` has coprime integer
/// coefficients and a positive leading coefficient. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        RatFunc::from_poly(Poly::int(n))
    }

    /// Builds and reduces `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self, RingError> {
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        Ok(RatFunc { num, den }.reduce())
    }

    /// Canonical form; idempotent.
    pub fn reduce(self) -> Self {
        let RatFunc { num, den } = self;
        if num.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = den.constant_value() {
            return RatFunc { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let (c, den) = den.primitive_split();
        RatFunc { num: num.scale(&c.recip()), den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn is_constant(&self) -> bool {
        self.is_poly() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_poly() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }.normalize_zero()
    }

    fn normalize_zero(self) -> Self {
        if self.num.is_zero() {
            RatFunc::zero()
        } else {
            self
        }
    }

    pub fn recip(&self) -> Result<RatFunc, RingError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn evaluate(&self, bindings: &BTreeMap<Var, Rational>) -> Result<RatFunc, RingError> {
        RatFunc::new(self.num.evaluate(bindings), self.den.evaluate(bindings))
    }

    pub fn evaluate_full(&self, bindings: &BTreeMap<Var, Rational>) -> Result<Rational, RingError> {
        let n = self.num.evaluate(bindings);
        let d = self.den.evaluate(bindings);
        match (n.constant_value(), d.constant_value()) {
            (Some(n), Some(d)) => {
                if d.is_zero() {
                    Err(RingError::DivisionByZero)
                } else {
                    Ok(n / d)
                }
            }
            _ => {
                let mut left = n.vars();
                left.extend(d.vars());
                Err(RingError::UnboundIndeterminate(
                    left.iter().map(|v| v.name().to_string()).collect::<Vec<_>>().join(", "),
                ))
            }
        }
    }

    pub fn substitute(&self, subs: &BTreeMap<Var, Poly>) -> Result<RatFunc, RingError> {
        RatFunc::new(self.num.substitute(subs), self.den.substitute(subs))
    }

    /// Substitution by rational functions.
    pub fn substitute_rat(&self, subs: &BTreeMap<Var, RatFunc>) -> Result<RatFunc, RingError> {
        Ok(&poly_subst_rat(&self.num, subs)? / &poly_subst_rat(&self.den, subs)?)
    }
}

fn poly_subst_rat(p: &Poly, subs: &BTreeMap<Var, RatFunc>) -> Result<RatFunc, RingError> {
    let mut out = RatFunc::zero();
    for (m, c) in p.terms() {
        let mut term = RatFunc::constant(c.clone());
        for (v, e) in m.powers() {
            let f = match subs.get(v) {
                Some(r) => r.clone(),
                None => RatFunc::from_poly(Poly::var(v.clone())),
            };
            for _ in 0..*e {
                term = &term * &f;
            }
        }
        out = &out + &term;
    }
    Ok(out)
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.num_terms() > 1 || p.leading_coefficient() < Rational::zero() {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RatFunc { num, den: Poly::one() };
            }
            return RatFunc { num, den: self.den.clone() }.reduce();
        }
        RatFunc {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
        .reduce()
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc { num: &self.num * &rhs.num, den: Poly::one() };
        }
        RatFunc { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.reduce()
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by the zero rational function.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RatFunc { num: &self.num * &rhs.den, den: &self.den * &rhs.num }.reduce()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}
