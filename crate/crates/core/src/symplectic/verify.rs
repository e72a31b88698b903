//! Checking a printed symplectic form and its nondegeneracy condition.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{prime_ratios, AlgebraDef, Bindings};
use crate::exterior::Form;
use crate::ring::{radical, split_factors, Poly, Rational, Var};

use super::decide::parameter_content;
use super::solve::has_no_real_zero;
use super::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Closed, and the nondegeneracy locus equals the stated condition.
    Exact,
    /// Closed, and the stated condition implies nondegeneracy.
    Pass,
    /// Not closed, or degenerate somewhere the condition holds.
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableVerdict {
    pub verdict: Verdict,
    pub closed: bool,
    /// `d(candidate)`, zero when closed.
    pub residue: String,
    /// Volume coefficient of the top power of the candidate.
    pub coefficient: String,
    /// Its factors in the parameters alone (nonzero on the branch).
    pub parameter_factor: String,
    /// Stated condition as parsed.
    pub condition: String,
    /// A point where the condition holds and the coefficient is nonzero.
    pub sample: Option<BTreeMap<String, String>>,
    /// A point where the condition holds but the coefficient vanishes.
    pub counterexample: Option<BTreeMap<String, String>>,
    pub notes: Vec<String>,
}

impl TableVerdict {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

fn show(b: &Bindings) -> BTreeMap<String, String> {
    b.iter().map(|(k, v)| (k.name().to_string(), v.to_string())).collect()
}

fn nonzero_at(p: &Poly, b: &Bindings) -> bool {
    p.evaluate_full(b).is_some_and(|v| !num_traits::Zero::is_zero(&v))
}

/// Checks that `candidate` is closed on `alg` identically in its
/// coefficients and the parameters, and that `condition != 0` forces its
/// top power to be nonzero.
pub fn verify_table_entry(alg: &AlgebraDef, candidate: &Form, condition: &Poly) -> Result<TableVerdict> {
    let mut notes = Vec::new();
    let d = alg.differential(candidate)?;
    let closed = d.is_zero();
    let top = candidate.top_power(alg.dim / 2)?.volume_coefficient();
    let coef = top.num().clone();
    let content = parameter_content(&coef);
    let reduced = coef.div_exact(&content).unwrap_or_else(|| coef.clone());
    let coef_vars: Vec<Var> = coef.vars().into_iter().chain(condition.vars()).filter(|v| !v.is_param()).collect();
    let mut coef_vars = coef_vars;
    coef_vars.sort();
    coef_vars.dedup();

    // parameter sample: admissible, parameter factor nonzero
    let params = alg.canonical_samples(1, |b| nonzero_at(&content, b) || content.is_constant());
    let base = params.into_iter().next().unwrap_or_default();
    if content.evaluate_full(&base).is_some_and(|v| num_traits::Zero::is_zero(&v)) {
        notes.push(format!("parameter factor {content} vanishes at every canonical sample"));
    }

    let seq = prime_ratios(coef_vars.len() + 64);
    let mut sample = None;
    for offset in 0..64 {
        let mut b = base.clone();
        for (k, v) in coef_vars.iter().enumerate() {
            b.insert(v.clone(), seq[offset + k].clone());
        }
        if nonzero_at(condition, &b) && nonzero_at(&coef, &b) {
            sample = Some(b);
            break;
        }
    }

    let rad_c = radical(&reduced);
    let rad_p = radical(condition);
    let implied = !reduced.is_zero()
        && split_factors(&rad_c).iter().all(|f| rad_p.div_exact(f).is_some() || forced_nonzero(f, &rad_p));
    let equal = implied && rad_p.div_exact(&rad_c).is_some() && rad_c.div_exact(&rad_p).is_some();
    let counterexample = if implied || reduced.is_zero() {
        if reduced.is_zero() {
            Some(base.clone())
        } else {
            None
        }
    } else {
        find_counterexample(&rad_c, &rad_p, condition, &coef, &base, &coef_vars)
    };
    let unproven = !implied && counterexample.is_none() && !reduced.is_zero();
    if unproven {
        notes.push("the condition is not shown to force nondegeneracy, and no real counterexample was found".into());
    }
    let verdict = if !closed || reduced.is_zero() || counterexample.is_some() || unproven {
        Verdict::Fail
    } else if equal {
        Verdict::Exact
    } else {
        Verdict::Pass
    };
    if sample.is_none() && verdict != Verdict::Fail {
        notes.push("no sample point with the condition and the coefficient both nonzero".into());
    }
    Ok(TableVerdict {
        verdict,
        closed,
        residue: d.display_with(alg.names()),
        coefficient: coef.to_string(),
        parameter_factor: content.to_string(),
        condition: condition.to_string(),
        sample: sample.as_ref().map(show),
        counterexample: counterexample.as_ref().map(show),
        notes,
    })
}

/// A positive combination of even monomials vanishes only where all its
/// monomials do; it is nonzero once the condition keeps one of them nonzero.
fn forced_nonzero(f: &Poly, rad_p: &Poly) -> bool {
    let f = f.canonical();
    if has_no_real_zero(&f) {
        return true;
    }
    let even_positive =
        f.terms().all(|(m, c)| num_traits::Signed::is_positive(c) && m.powers().iter().all(|(_, e)| e % 2 == 0));
    even_positive
        && f.terms().any(|(m, _)| {
            !m.is_one() && m.powers().iter().all(|(v, _)| rad_p.div_exact(&Poly::var(v.clone())).is_some())
        })
}

/// For a positive combination of even monomials: zero one variable of
/// each monomial, avoiding the variables the condition keeps nonzero.
fn even_positive_zero(
    f: &Poly,
    rad_p: &Poly,
    condition: &Poly,
    coef: &Poly,
    base: &Bindings,
    vars: &[Var],
    seq: &[Rational],
) -> Option<Bindings> {
    let f = f.canonical();
    let even_positive =
        f.terms().all(|(m, c)| num_traits::Signed::is_positive(c) && m.powers().iter().all(|(_, e)| e % 2 == 0));
    if !even_positive || f.terms().any(|(m, _)| m.is_one()) {
        return None;
    }
    let mut zeroed: Vec<Var> = Vec::new();
    for (m, _) in f.terms() {
        if m.powers().iter().any(|(v, _)| zeroed.contains(v)) {
            continue;
        }
        let v = m.powers().iter().map(|(v, _)| v).find(|v| rad_p.div_exact(&Poly::var((*v).clone())).is_none())?;
        zeroed.push(v.clone());
    }
    for offset in 0..32 {
        let mut b = base.clone();
        for (k, v) in vars.iter().enumerate() {
            b.insert(v.clone(), seq[offset + k].clone());
        }
        for v in &zeroed {
            b.insert(v.clone(), Rational::from_integer(0.into()));
        }
        if nonzero_at(condition, &b) && coef.evaluate_full(&b).is_some_and(|v| num_traits::Zero::is_zero(&v)) {
            return Some(b);
        }
    }
    None
}

/// A real point with `condition != 0` on a factor of the coefficient that
/// the condition does not account for. Only factors linear in some
/// coefficient are tried.
fn find_counterexample(
    rad_c: &Poly,
    rad_p: &Poly,
    condition: &Poly,
    coef: &Poly,
    base: &Bindings,
    vars: &[Var],
) -> Option<Bindings> {
    let seq = prime_ratios(vars.len() + 32);
    for f in split_factors(rad_c) {
        if rad_p.div_exact(&f).is_some() || forced_nonzero(&f, rad_p) {
            continue;
        }
        if let Some(b) = even_positive_zero(&f, rad_p, condition, coef, base, vars, &seq) {
            return Some(b);
        }
        for x in f.vars().into_iter().filter(|v| !v.is_param()) {
            if f.degree_in(&x) != 1 {
                continue;
            }
            let cs = f.coeffs_in(&x);
            for offset in 0..32 {
                let mut b = base.clone();
                for (k, v) in vars.iter().enumerate() {
                    if *v != x {
                        b.insert(v.clone(), seq[offset + k].clone());
                    }
                }
                let (Some(c0), Some(c1)) = (cs[0].evaluate_full(&b), cs[1].evaluate_full(&b)) else { continue };
                if num_traits::Zero::is_zero(&c1) {
                    continue;
                }
                let value: Rational = -c0 / c1;
                b.insert(x.clone(), value);
                if nonzero_at(condition, &b) && coef.evaluate_full(&b).is_some_and(|v| num_traits::Zero::is_zero(&v)) {
                    return Some(b);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Catalog;
    use crate::ring::parse_poly;

    fn g537() -> (AlgebraDef, Form) {
        let c = Catalog::bundled();
        let a = c.resolve("g5_37+L1").unwrap();
        let f = a
            .parse_form("a1*d(w1) + a2*d(w2) + a3*d(w3) + a4*(w4^w5) + a5*(w4^w6) + a6*(w5^w6)")
            .unwrap();
        (a, f)
    }

    #[test]
    fn g5_37_row_passes_and_altered_condition_fails() {
        let (a, f) = g537();
        let v = verify_table_entry(&a, &f, &parse_poly("a1*a6").unwrap()).unwrap();
        assert!(v.closed);
        assert_eq!(v.verdict, Verdict::Exact, "{v:?}");
        let w = verify_table_entry(&a, &f, &parse_poly("a2*a6").unwrap()).unwrap();
        assert_eq!(w.verdict, Verdict::Fail);
        let ce = w.counterexample.unwrap();
        assert_eq!(ce["a1"], "0");
    }

    #[test]
    fn sum_of_squares_factor_follows_from_a_product_condition() {
        let c = Catalog::bundled();
        let a = c.resolve("N6_13(alpha,beta,-alpha,-beta)").unwrap();
        let f = a.parse_form("a1*d(e1) + a2*d(e2) + a3*d(e3) + a4*d(e4) + a5*(e1^e2) + a6*(w1^w2)").unwrap();
        let v = verify_table_entry(&a, &f, &parse_poly("a5*(a3^2 + a4^2)").unwrap()).unwrap();
        assert_eq!(v.verdict, Verdict::Exact, "{v:?}");
        // a3*a4*a5 != 0 forces a3^2 + a4^2 > 0 but describes a smaller locus
        let w = verify_table_entry(&a, &f, &parse_poly("a3*a4*a5").unwrap()).unwrap();
        assert_eq!(w.verdict, Verdict::Pass, "{w:?}");
        // a3*a5 != 0 alone leaves a4 free and still forces it
        let u = verify_table_entry(&a, &f, &parse_poly("a4*a5").unwrap()).unwrap();
        assert_eq!(u.verdict, Verdict::Pass, "{u:?}");
        let x = verify_table_entry(&a, &f, &parse_poly("a5").unwrap()).unwrap();
        assert_eq!(x.verdict, Verdict::Fail, "{x:?}");
    }

    #[test]
    fn non_closed_candidate_fails() {
        let (a, _) = g537();
        let f = a.parse_form("a1*(w1^w2) + a6*(w5^w6) + a4*(w3^w4)").unwrap();
        let v = verify_table_entry(&a, &f, &parse_poly("a1*a4*a6").unwrap()).unwrap();
        assert!(!v.closed);
        assert_eq!(v.verdict, Verdict::Fail);
    }
}
