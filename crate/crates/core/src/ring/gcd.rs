//! Multivariate gcd over the rationals and the light-weight factor splitting
//! used by the branching solver.
//!
//! The gcd is the classical recursive scheme: pick an indeterminate, split both
//! inputs into content and primitive part with respect to it, and run a
//! primitive pseudo-remainder sequence on the primitive parts. Inputs in this
//! crate are tiny (a handful of indeterminates, low degree) so coefficient
//! growth is not a concern.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Poly, Rational, Var};

/// Greatest common divisor, normalized to [`Poly::canonical`] form.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.canonical();
    }
    if b.is_zero() {
        return a.canonical();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.canonical();
    }
    let mut vars: BTreeSet<Var> = a.vars();
    vars.extend(b.vars());
    let x = vars.into_iter().next().expect("non-constant input");
    if !a.contains_var(&x) {
        return gcd(a, &content_in(b, &x));
    }
    if !b.contains_var(&x) {
        return gcd(&content_in(a, &x), b);
    }
    let ca = content_in(a, &x);
    let cb = content_in(b, &x);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = primitive_prs(pa, pb, &x);
    (&c * &g).canonical()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
pub fn content_in(p: &Poly, x: &Var) -> Poly {
    let mut g = Poly::zero();
    for c in p.coeffs_in(x) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part_in(p: &Poly, x: &Var) -> Poly {
    let c = content_in(p, x);
    p.div_exact(&c).expect("content divides")
}

fn pseudo_rem(a: &Poly, b: &Poly, x: &Var) -> Poly {
    let db = b.degree_in(x);
    let bc = b.coeffs_in(x);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    while !r.is_zero() && r.contains_var(x) && r.degree_in(x) >= db {
        let dr = r.degree_in(x);
        let lr = r.coeffs_in(x)[dr as usize].clone();
        let shift = Poly::var(x.clone()).pow(dr - db);
        r = &(&lb * &r) - &(&(&lr * &shift) * b);
    }
    r
}

fn primitive_prs(mut a: Poly, mut b: Poly, x: &Var) -> Poly {
    if a.degree_in(x) < b.degree_in(x) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = pseudo_rem(&a, &b, x);
        if r.is_zero() {
            return primitive_part_in(&b, x).canonical();
        }
        if !r.contains_var(x) {
            return Poly::one();
        }
        a = b;
        b = primitive_part_in(&r, x);
    }
}

/// Least common multiple in canonical form.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    (&a.div_exact(&g).expect("gcd divides") * b).canonical()
}

/// Square-free part `p / gcd(p, dp/dx1, ..., dp/dxn)`, canonical.
pub fn radical(p: &Poly) -> Poly {
    if p.is_zero() || p.is_constant() {
        return p.canonical();
    }
    let mut g = p.clone();
    for v in p.vars() {
        g = gcd(&g, &p.derivative(&v));
        if g.is_one() {
            break;
        }
    }
    p.div_exact(&g).expect("gcd divides").canonical()
}

/// Splits `p` into pairwise distinct, square-free, canonical factors.
///
/// This is not a full factorization: it separates monomial content and the
/// contents with respect to each indeterminate, which covers products of
/// polynomials in different indeterminates such as `(alpha+gamma)*(beta+delta)`.
/// Constant input gives an empty list.
pub fn split_factors(p: &Poly) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    split_into(p, &mut out);
    out.sort_by(|a, b| a.pivot_cmp(b));
    out.dedup();
    out
}

fn split_into(p: &Poly, out: &mut Vec<Poly>) {
    if p.is_zero() || p.is_constant() {
        return;
    }
    // monomial content
    for v in p.vars() {
        let min = p
            .terms()
            .map(|(m, _)| m.degree_in(&v))
            .min()
            .unwrap_or(0);
        if min > 0 {
            let x = Poly::var(v.clone());
            out.push(x.canonical());
            let rest = p.div_exact(&x.pow(min)).expect("monomial content divides");
            split_into(&rest, out);
            return;
        }
    }
    for v in p.vars() {
        let c = content_in(p, &v);
        if !c.is_constant() {
            split_into(&c, out);
            split_into(&p.div_exact(&c).expect("content divides"), out);
            return;
        }
    }
    if let Some(f) = rational_linear_factor(p) {
        split_into(&f, out);
        split_into(&p.div_exact(&f).expect("root gives a factor"), out);
        return;
    }
    let r = radical(p);
    if !out.contains(&r) {
        out.push(r);
    }
}

/// `q*x - s` dividing a univariate `p` of degree at least 2, by the rational
/// root test. Coefficients too large to enumerate divisors are skipped.
fn rational_linear_factor(p: &Poly) -> Option<Poly> {
    let vars = p.vars();
    if vars.len() != 1 {
        return None;
    }
    let x = vars.into_iter().next().expect("one variable");
    if p.degree_in(&x) < 2 {
        return None;
    }
    let cs: Vec<Rational> = p.coeffs_in(&x).iter().map(|c| c.constant_value().unwrap_or_default()).collect();
    let den = cs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = cs.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
    let (lead, tail) = (ints.last()?.abs(), ints[0].abs());
    let bound = BigInt::from(1_000_000);
    if tail.is_zero() || lead > bound || tail > bound {
        return None;
    }
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.to_u64().expect("bounded");
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(BigInt::from).collect()
    };
    for q in divisors(&lead) {
        for s in divisors(&tail) {
            for s in [s.clone(), -s] {
                if !s.gcd(&q).is_one() {
                    continue;
                }
                let root = Rational::new(s.clone(), q.clone());
                let value = cs.iter().rev().fold(Rational::zero(), |acc, c| acc * root.clone() + c.clone());
                if value.is_zero() {
                    let f = &Poly::var(x.clone()).scale(&Rational::from_integer(q.clone())) - &Poly::constant(Rational::from_integer(s));
                    return Some(f.canonical());
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Poly {
        Poly::var(Var::param(n))
    }

    #[test]
    fn gcd_of_products() {
        let a = &v("alpha") + &v("gamma");
        let b = &v("beta") - &Poly::int(2);
        let c = &v("delta") + &Poly::int(1);
        let g = gcd(&(&a * &b), &(&a * &c).scale(&super::super::Rational::from_integer(3.into())));
        assert_eq!(g, a.canonical());
        assert!(gcd(&b, &c).is_one());
    }

    #[test]
    fn gcd_univariate_quadratic() {
        let x = v("p");
        let f = &(&x * &x) - &Poly::int(1);
        let g = &(&x * &x) + &(&x.scale(&super::super::rat(2, 1)) + &Poly::int(1));
        assert_eq!(gcd(&f, &g).to_string(), "p + 1");
    }

    #[test]
    fn univariate_rational_roots_split() {
        let x = v("p");
        let f = &(&x * &x) - &Poly::int(1);
        let parts: Vec<String> = split_factors(&f).iter().map(ToString::to_string).collect();
        assert_eq!(parts.len(), 2);
        assert!(parts.contains(&"p - 1".to_string()) && parts.contains(&"p + 1".to_string()), "{parts:?}");
        let g = &(&x * &x) + &Poly::int(1);
        assert_eq!(split_factors(&g), vec![g.canonical()]);
        let h = &(&x * &x).scale(&super::super::rat(4, 1)) - &Poly::int(1);
        assert_eq!(split_factors(&h).len(), 2);
    }

    #[test]
    fn radical_and_split() {
        let a = &v("alpha") + &v("gamma");
        let sq = &(&a * &a) * &v("beta");
        assert_eq!(radical(&sq), (&a * &v("beta")).canonical());
        let prod = &(&a * &(&v("beta") + &v("delta"))) * &v("gamma").pow(2);
        let fs: Vec<String> = split_factors(&prod).iter().map(|p| p.to_string()).collect();
        assert_eq!(fs, ["gamma", "alpha + gamma", "beta + delta"]);
    }
}
