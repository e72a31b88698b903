//! `L(g) = span{d w_k}` and the invariant `j0`.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraDef, Bindings};
use crate::exterior::Form;
use crate::ring::{Poly, RatFunc, Rational, Var};

use super::Result;

/// A basis of `L(g)` chosen among the `d w_k`, over the parameter field.
pub fn exact_space(alg: &AlgebraDef) -> Vec<Form> {
    let mut basis: Vec<Form> = Vec::new();
    // reduced rows: (pivot pair, coordinates)
    let mut rows: Vec<(Vec<u8>, Form)> = Vec::new();
    for f in &alg.mc {
        let mut r = f.clone();
        for (key, row) in &rows {
            let idx: Vec<usize> = key.iter().map(|&x| x as usize).collect();
            let c = r.coefficient(&idx);
            if !c.is_zero() {
                r = r.sub(&row.scale(&c)).expect("same dimension");
            }
        }
        let Some((key, c)) = r.terms().next().map(|(k, c)| (k.to_vec(), c.clone())) else { continue };
        let inv = c.recip().expect("nonzero leading coefficient");
        let r = r.scale(&inv);
        for (_, row) in rows.iter_mut() {
            let idx: Vec<usize> = key.iter().map(|&x| x as usize).collect();
            let c = row.coefficient(&idx);
            if !c.is_zero() {
                *row = row.sub(&r.scale(&c)).expect("same dimension");
            }
        }
        rows.push((key, r));
        basis.push(f.clone());
    }
    basis
}

/// Largest `m` with `(sum x_k d w_k)^m != 0` over the parameter field,
/// i.e. half the generic rank of elements of `L(g)`.
pub fn j0_generic(alg: &AlgebraDef) -> Result<usize> {
    let mut l = Form::zero(alg.dim);
    for (k, f) in alg.mc.iter().enumerate() {
        if !f.is_zero() {
            let x = RatFunc::from_poly(Poly::var(Var::coef(&format!("x{}", k + 1))));
            l = l.add(&f.scale(&x))?;
        }
    }
    let mut acc = Form::scalar(alg.dim, RatFunc::one());
    let mut m = 0;
    while 2 * (m + 1) <= alg.dim {
        acc = acc.wedge(&l)?;
        if acc.is_zero() {
            break;
        }
        m += 1;
    }
    Ok(m)
}

/// `j0` at a full parameter binding.
pub fn j0(alg: &AlgebraDef, bindings: &Bindings) -> Result<usize> {
    let names: BTreeMap<String, Rational> = bindings.iter().map(|(k, v)| (k.name().to_string(), v.clone())).collect();
    j0_generic(&alg.instantiate(&names)?)
}

/// Some element of `L(g)` is symplectic: even dimension and `2 j0 = dim`.
pub fn decide_exact_symplectic(alg: &AlgebraDef) -> Result<bool> {
    Ok(alg.dim.is_multiple_of(2) && 2 * j0_generic(alg)? == alg.dim)
}
