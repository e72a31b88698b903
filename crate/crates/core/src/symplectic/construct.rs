//! Symplectic forms on sums of two odd-dimensional algebras, and contact
//! forms from elements of `L(g)`.

use crate::algebra::AlgebraDef;
use crate::exterior::Form;
use crate::ring::RatFunc;

use super::{Result, SymplecticError};

fn require_odd(alg: &AlgebraDef) -> Result<usize> {
    if alg.dim.is_multiple_of(2) {
        return Err(SymplecticError::EvenDimension { name: alg.name.clone(), dim: alg.dim });
    }
    Ok(alg.dim / 2)
}

fn require_closed_generator(alg: &AlgebraDef, index: usize) -> Result<()> {
    if index == 0 || index > alg.dim {
        return Err(SymplecticError::BadIndex { index, dim: alg.dim });
    }
    if !alg.mc[index - 1].is_zero() {
        return Err(SymplecticError::NotClosedGenerator { name: alg.name.clone(), index });
    }
    Ok(())
}

/// Conditions 1 to 3 on `theta` relative to the closed generator `index`:
/// `theta` avoids `index`, is closed, and has nonzero `n`-th power.
fn check_theta(alg: &AlgebraDef, index: usize, theta: &Form, n: usize, label: &str) -> Result<()> {
    if theta.dim() != alg.dim || !(theta.is_zero() || theta.is_homogeneous(2)) {
        return Err(SymplecticError::Condition {
            number: 1,
            detail: format!("{label} must be a 2-form on {}", alg.name),
        });
    }
    if let Some((k, _)) = theta.terms().find(|(k, _)| k.contains(&(index as u8))) {
        let idx: Vec<String> = k.iter().map(|i| format!("w{i}")).collect();
        return Err(SymplecticError::Condition {
            number: 1,
            detail: format!("{label} has a component along {} containing w{index}", idx.join("^")),
        });
    }
    let d = alg.differential(theta)?;
    if !d.is_zero() {
        return Err(SymplecticError::Condition { number: 2, detail: format!("d {label} = {d}") });
    }
    let top = if n == 0 { Form::scalar(alg.dim, RatFunc::one()) } else { theta.top_power(n)? };
    if top.is_zero() {
        return Err(SymplecticError::Condition { number: 3, detail: format!("{label}^{n} = 0") });
    }
    Ok(())
}

/// `eta = theta + theta' + w_c ^ w'_c'` on `r1 (+) r2`, where `w_c` and
/// `w'_c'` are closed generators of the summands. Returns the sum and `eta`
/// after checking that `eta` is closed and of maximal rank.
pub fn prop2_combine(
    r1: &AlgebraDef,
    c1: usize,
    theta: &Form,
    r2: &AlgebraDef,
    c2: usize,
    theta2: &Form,
) -> Result<(AlgebraDef, Form)> {
    let n = require_odd(r1)?;
    let m = require_odd(r2)?;
    require_closed_generator(r1, c1)?;
    require_closed_generator(r2, c2)?;
    check_theta(r1, c1, theta, n, "theta")?;
    check_theta(r2, c2, theta2, m, "theta'")?;
    let sum = r1.direct_sum(r2)?;
    let dim = sum.dim;
    // parameters of r2 may have been renamed in the sum
    let renamed = rename_like_sum(r1, r2, &sum, theta2)?;
    let eta = theta
        .shift(0, dim)?
        .add(&renamed.shift(r1.dim, dim)?)?
        .add(&Form::term(dim, &[c1, r1.dim + c2], RatFunc::one())?)?;
    let d = sum.differential(&eta)?;
    if !d.is_zero() {
        return Err(SymplecticError::Construction(format!("d eta = {d}")));
    }
    if eta.top_power(n + m + 1)?.is_zero() {
        return Err(SymplecticError::Construction(format!("eta^{} = 0", n + m + 1)));
    }
    Ok((sum, eta))
}

fn rename_like_sum(r1: &AlgebraDef, r2: &AlgebraDef, sum: &AlgebraDef, f: &Form) -> Result<Form> {
    use std::collections::BTreeMap;
    let offset = r1.params.len();
    let subs: BTreeMap<_, _> = r2
        .params
        .iter()
        .zip(&sum.params[offset..])
        .filter(|(a, b)| a.var != b.var)
        .map(|(a, b)| (a.var.clone(), crate::ring::Poly::var(b.var.clone())))
        .collect();
    Ok(f.substitute(&subs)?)
}

/// Whether `eta` is a contact form: `eta ^ (d eta)^n != 0` in dimension `2n+1`.
pub fn is_contact(alg: &AlgebraDef, eta: &Form) -> Result<bool> {
    let n = require_odd(alg)?;
    let d = alg.differential(eta)?;
    let top = if n == 0 { Form::scalar(alg.dim, RatFunc::one()) } else { d.top_power(n)? };
    Ok(!eta.wedge(&top)?.is_zero())
}

/// `eta = w_c + sum a_i w_i` for a closed generator `w_c` and
/// `theta = sum a_i d w_i` satisfying conditions 1 to 3; checks membership
/// and the contact property.
pub fn contact_candidate(alg: &AlgebraDef, c: usize, theta: &Form, combo: &[(usize, RatFunc)]) -> Result<Form> {
    let n = require_odd(alg)?;
    require_closed_generator(alg, c)?;
    check_theta(alg, c, theta, n, "theta")?;
    let mut sum = Form::zero(alg.dim);
    let mut eta = Form::term(alg.dim, &[c], RatFunc::one())?;
    for (i, a) in combo {
        if *i == 0 || *i > alg.dim {
            return Err(SymplecticError::BadIndex { index: *i, dim: alg.dim });
        }
        sum = sum.add(&alg.mc[i - 1].scale(a))?;
        eta = eta.add(&Form::term(alg.dim, &[*i], a.clone())?)?;
    }
    let diff = theta.sub(&sum)?;
    if !diff.is_zero() {
        let text: Vec<String> = combo.iter().map(|(i, a)| format!("({a})*d(w{i})")).collect();
        return Err(SymplecticError::Membership { combo: text.join(" + "), difference: diff.to_string() });
    }
    if !is_contact(alg, &eta)? {
        return Err(SymplecticError::Construction(format!("eta ^ (d eta)^{n} = 0 for eta = {eta}")));
    }
    Ok(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Catalog;

    fn form(alg: &AlgebraDef, s: &str) -> Form {
        alg.parse_form(s).unwrap()
    }

    #[test]
    fn a3_4_minus_one_twice() {
        let c = Catalog::bundled();
        let a = c.resolve("A3_4(-1)").unwrap();
        let (sum, eta) = prop2_combine(&a, 3, &form(&a, "w1^w2"), &a, 3, &form(&a, "w1^w2")).unwrap();
        assert_eq!(sum.dim, 6);
        assert_eq!(eta.to_string(), "(w1^w2) + (w3^w6) + (w4^w5)");
    }

    #[test]
    fn condition_errors() {
        let c = Catalog::bundled();
        let a = c.resolve("A3_4(-1)").unwrap();
        let e = prop2_combine(&a, 3, &form(&a, "w2^w3"), &a, 3, &form(&a, "w1^w2")).unwrap_err();
        assert!(matches!(e, SymplecticError::Condition { number: 1, .. }), "{e}");
        let b = c.get("A3_3").unwrap();
        let e = prop2_combine(b, 3, &form(b, "w1^w2"), &a, 3, &form(&a, "w1^w2")).unwrap_err();
        assert!(matches!(e, SymplecticError::Condition { number: 2, .. }), "{e}");
        let e = prop2_combine(&a, 3, &Form::zero(3), &a, 3, &form(&a, "w1^w2")).unwrap_err();
        assert!(matches!(e, SymplecticError::Condition { number: 3, .. }), "{e}");
        let e = prop2_combine(&a, 1, &form(&a, "w2^w3"), &a, 3, &form(&a, "w1^w2")).unwrap_err();
        assert!(matches!(e, SymplecticError::NotClosedGenerator { index: 1, .. }), "{e}");
    }

    #[test]
    fn contact_forms() {
        let c = Catalog::bundled();
        let a = c.resolve("A3_4(-1)").unwrap();
        assert!(is_contact(&a, &form(&a, "w1 + w2")).unwrap());
        assert!(!is_contact(&a, &form(&a, "w3")).unwrap());
        let e = contact_candidate(&a, 3, &Form::zero(3), &[]).unwrap_err();
        assert!(matches!(e, SymplecticError::Condition { number: 3, .. }), "{e}");
    }
}
