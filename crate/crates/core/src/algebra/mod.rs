//! Lie algebras given by Maurer-Cartan equations, the exterior differential
//! they induce, and the bundled catalog.

pub mod catalog;
pub mod dsl;
pub mod expr;
pub mod range;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{BasisNames, ExteriorError, Form};
use crate::ring::{Poly, RatFunc, Rational, RingError, Var};

pub use catalog::{Catalog, CatalogError, Errata};
pub use expr::{parse_form, ExprError, FormScope, PlainScope};

/// Rational values for some or all parameters.
pub type Bindings = BTreeMap<Var, Rational>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("{name}: parameter values violate constraint {constraint} != 0")]
    ConstraintViolated { name: String, constraint: String },
    #[error("{name}: unknown parameter '{param}'")]
    UnknownParameter { name: String, param: String },
    #[error("{name}: missing values for {missing}")]
    MissingParameters { name: String, missing: String },
    #[error("{name}: expected {expected} parameter values, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("{name}: d{index} must be a 2-form")]
    NotTwoForm { name: String, index: usize },
    #[error("invalid permutation of 1..={0}")]
    BadPermutation(usize),
    #[error("{0}")]
    Expr(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamSpec {
    #[serde(serialize_with = "ser_var")]
    pub var: Var,
    /// Free-text range as printed (`-1<=alpha<=1`); not enforced.
    pub range: Option<String>,
}

fn ser_var<S: serde::Serializer>(v: &Var, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.name())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AlgebraMeta {
    pub nilradical_dim: Option<usize>,
    pub decomposable: bool,
    pub summands: Vec<String>,
    pub source: Option<String>,
    pub names: BasisNames,
    /// Values fixed by [`AlgebraDef::instantiate`] or
    /// [`AlgebraDef::specialize`], as printed strings in parameter order.
    pub bindings: Vec<(String, String)>,
}

/// `d w_k` for `k = 1..=n`, each a homogeneous 2-form.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraDef {
    pub name: String,
    pub dim: usize,
    pub params: Vec<ParamSpec>,
    /// Each polynomial must be nonzero at admissible parameter values.
    pub constraints: Vec<Poly>,
    pub mc: Vec<Form>,
    pub meta: AlgebraMeta,
}

/// `C^k_ij` for `i < j`, with `[e_i, e_j] = sum_k C^k_ij e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub dim: usize,
    pub entries: BTreeMap<(usize, usize, usize), RatFunc>,
}

/// Outcome of the Jacobi check: `d(d w_k)` for every `k` where it is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiReport {
    pub failures: Vec<(usize, Form)>,
    /// Sample points at which some failure evaluates to a nonzero form.
    pub counterexamples: Vec<Bindings>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl AlgebraDef {
    /// Checks grades and indices of a freshly assembled definition.
    pub fn new(
        name: &str,
        params: Vec<ParamSpec>,
        constraints: Vec<Poly>,
        mc: Vec<Form>,
        meta: AlgebraMeta,
    ) -> Result<Self, AlgebraError> {
        let dim = mc.len();
        for (k, f) in mc.iter().enumerate() {
            if f.dim() != dim {
                return Err(ExteriorError::DimensionMismatch(f.dim(), dim).into());
            }
            if !f.is_homogeneous(2) {
                return Err(AlgebraError::NotTwoForm { name: name.to_string(), index: k + 1 });
            }
        }
        Ok(AlgebraDef { name: name.to_string(), dim, params, constraints, mc, meta })
    }

    pub fn param_vars(&self) -> Vec<Var> {
        self.params.iter().map(|p| p.var.clone()).collect()
    }

    pub fn param(&self, name: &str) -> Option<&Var> {
        self.params.iter().map(|p| &p.var).find(|v| v.name() == name)
    }

    pub fn names(&self) -> BasisNames {
        self.meta.names
    }

    /// Display name including fixed parameter values, e.g. `N6_1(1,1,-1,0)`.
    pub fn label(&self) -> String {
        if self.meta.bindings.is_empty() || self.meta.decomposable {
            return self.name.clone();
        }
        let vals: Vec<&str> = self.meta.bindings.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}({})", self.name, vals.join(","))
    }

    /// `d` on an arbitrary form, by the graded Leibniz rule.
    pub fn differential(&self, f: &Form) -> Result<Form, AlgebraError> {
        if f.dim() != self.dim {
            return Err(ExteriorError::DimensionMismatch(f.dim(), self.dim).into());
        }
        let mut out = Form::zero(self.dim);
        for (idx, c) in f.terms() {
            for j in 0..idx.len() {
                let left: Vec<usize> = idx[..j].iter().map(|&i| i as usize).collect();
                let right: Vec<usize> = idx[j + 1..].iter().map(|&i| i as usize).collect();
                let mid = &self.mc[idx[j] as usize - 1];
                if mid.is_zero() {
                    continue;
                }
                let sign = if j % 2 == 0 { c.clone() } else { -c };
                let l = Form::term(self.dim, &left, sign)?;
                let r = Form::term(self.dim, &right, RatFunc::one())?;
                out = out.add(&l.wedge(mid)?.wedge(&r)?)?;
            }
        }
        Ok(out)
    }

    /// Symbolic `d^2 = 0` check on every generator. Samples must satisfy the
    /// constraints; they are only used to report counterexample points.
    pub fn jacobi_check(&self, samples: &[Bindings]) -> Result<JacobiReport, AlgebraError> {
        for s in samples {
            self.check_constraints(s)?;
        }
        let mut failures = Vec::new();
        for k in 0..self.dim {
            let dd = self.differential(&self.mc[k])?;
            if !dd.is_zero() {
                failures.push((k + 1, dd));
            }
        }
        let mut counterexamples = Vec::new();
        for s in samples {
            let mut hit = false;
            for (_, f) in &failures {
                if !f.evaluate(s)?.is_zero() {
                    hit = true;
                }
            }
            if hit {
                counterexamples.push(s.clone());
            }
        }
        Ok(JacobiReport { failures, counterexamples })
    }

    pub fn structure_constants(&self) -> StructureConstants {
        let mut entries = BTreeMap::new();
        for (k, f) in self.mc.iter().enumerate() {
            for (idx, c) in f.terms() {
                entries.insert((idx[0] as usize, idx[1] as usize, k + 1), -c);
            }
        }
        StructureConstants { dim: self.dim, entries }
    }

    /// `d w_k = -sum_{i<j} C^k_ij w_i ^ w_j`.
    pub fn mc_from_structure_constants(sc: &StructureConstants) -> Result<Vec<Form>, AlgebraError> {
        let mut mc = vec![Form::zero(sc.dim); sc.dim];
        for (&(i, j, k), c) in &sc.entries {
            if k == 0 || k > sc.dim {
                return Err(ExteriorError::IndexOutOfRange { index: k, dim: sc.dim }.into());
            }
            mc[k - 1] = mc[k - 1].add(&Form::term(sc.dim, &[i, j], -c)?)?;
        }
        Ok(mc)
    }

    /// Errors naming the first constraint that vanishes at `b`. Unbound
    /// parameters are left symbolic; a constraint that stays non-constant
    /// passes.
    pub fn check_constraints(&self, b: &Bindings) -> Result<(), AlgebraError> {
        for c in &self.constraints {
            if c.evaluate(b).is_zero() {
                return Err(AlgebraError::ConstraintViolated {
                    name: self.name.clone(),
                    constraint: c.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Fixes every parameter to a rational value.
    pub fn instantiate(&self, values: &BTreeMap<String, Rational>) -> Result<AlgebraDef, AlgebraError> {
        let mut b = Bindings::new();
        for (name, v) in values {
            let var = self.param(name).ok_or_else(|| AlgebraError::UnknownParameter {
                name: self.name.clone(),
                param: name.clone(),
            })?;
            b.insert(var.clone(), v.clone());
        }
        let missing: Vec<&str> =
            self.params.iter().filter(|p| !b.contains_key(&p.var)).map(|p| p.var.name()).collect();
        if !missing.is_empty() {
            return Err(AlgebraError::MissingParameters { name: self.name.clone(), missing: missing.join(", ") });
        }
        self.check_constraints(&b)?;
        let mc = self.mc.iter().map(|f| f.evaluate(&b)).collect::<Result<Vec<_>, _>>()?;
        let mut meta = self.meta.clone();
        for p in &self.params {
            meta.bindings.push((p.var.name().to_string(), b[&p.var].to_string()));
        }
        Ok(AlgebraDef { name: self.name.clone(), dim: self.dim, params: Vec::new(), constraints: Vec::new(), mc, meta })
    }

    /// Positional version of [`instantiate`](Self::instantiate), in declared
    /// parameter order.
    pub fn instantiate_positional(&self, values: &[Rational]) -> Result<AlgebraDef, AlgebraError> {
        if values.len() != self.params.len() {
            return Err(AlgebraError::Arity { name: self.name.clone(), expected: self.params.len(), got: values.len() });
        }
        let map = self.params.iter().zip(values).map(|(p, v)| (p.var.name().to_string(), v.clone())).collect();
        self.instantiate(&map)
    }

    /// Substitutes polynomials in the remaining parameters for some
    /// parameters. A constraint that becomes identically zero is an error; one
    /// that becomes a nonzero constant is dropped.
    pub fn specialize(&self, subs: &BTreeMap<Var, Poly>) -> Result<AlgebraDef, AlgebraError> {
        let known: BTreeSet<Var> = self.param_vars().into_iter().collect();
        for (v, p) in subs {
            if !known.contains(v) {
                return Err(AlgebraError::UnknownParameter { name: self.name.clone(), param: v.name().into() });
            }
            if let Some(u) = p.vars().into_iter().find(|u| !known.contains(u)) {
                return Err(AlgebraError::UnknownParameter { name: self.name.clone(), param: u.name().into() });
            }
        }
        let mut constraints = Vec::new();
        for c in &self.constraints {
            let s = c.substitute(subs);
            if s.is_zero() {
                return Err(AlgebraError::ConstraintViolated { name: self.name.clone(), constraint: c.to_string() });
            }
            if !s.is_constant() {
                constraints.push(s);
            }
        }
        let mc = self.mc.iter().map(|f| f.substitute(subs)).collect::<Result<Vec<_>, _>>()?;
        let mut meta = self.meta.clone();
        for p in &self.params {
            if let Some(v) = subs.get(&p.var) {
                meta.bindings.push((p.var.name().to_string(), v.to_string()));
            }
        }
        let params = self.params.iter().filter(|p| !subs.contains_key(&p.var)).cloned().collect();
        Ok(AlgebraDef { name: self.name.clone(), dim: self.dim, params, constraints, mc, meta })
    }

    /// Renames basis index `i` to `perm[i-1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<AlgebraDef, AlgebraError> {
        let n = self.dim;
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(AlgebraError::BadPermutation(n));
        }
        for &p in perm {
            if p == 0 || p > n || seen[p - 1] {
                return Err(AlgebraError::BadPermutation(n));
            }
            seen[p - 1] = true;
        }
        let mut mc = vec![Form::zero(n); n];
        for k in 0..n {
            mc[perm[k] - 1] = self.mc[k].relabel(perm)?;
        }
        let mut meta = self.meta.clone();
        meta.names = BasisNames::Omega;
        Ok(AlgebraDef { mc, meta, ..self.clone() })
    }

    /// The direct sum `self (+) other`; `other`'s basis follows `self`'s and
    /// its parameters are renamed `<name>_2`, `<name>_3`, ... on collision.
    pub fn direct_sum(&self, other: &AlgebraDef) -> Result<AlgebraDef, AlgebraError> {
        let n = self.dim + other.dim;
        let mut taken: BTreeSet<String> = self.params.iter().map(|p| p.var.name().to_string()).collect();
        let mut subs = BTreeMap::new();
        let mut params = self.params.clone();
        for p in &other.params {
            let base = p.var.name();
            let mut name = base.to_string();
            let mut k = 2;
            while taken.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            taken.insert(name.clone());
            let v = Var::param(&name);
            if name != base {
                subs.insert(p.var.clone(), Poly::var(v.clone()));
            }
            params.push(ParamSpec { var: v, range: p.range.clone() });
        }
        let mut mc = Vec::with_capacity(n);
        for f in &self.mc {
            mc.push(f.shift(0, n)?);
        }
        for f in &other.mc {
            mc.push(f.substitute(&subs)?.shift(self.dim, n)?);
        }
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().map(|c| c.substitute(&subs)));
        let parts = |a: &AlgebraDef| if a.meta.decomposable { a.meta.summands.clone() } else { vec![a.label()] };
        let mut summands = parts(self);
        summands.extend(parts(other));
        let meta = AlgebraMeta {
            nilradical_dim: None,
            decomposable: true,
            summands: summands.clone(),
            source: None,
            names: BasisNames::Omega,
            bindings: Vec::new(),
        };
        Ok(AlgebraDef { name: summands.join("+"), dim: n, params, constraints, mc, meta })
    }

    /// Indices `k` with `d w_k = 0`.
    pub fn closed_generators(&self) -> Vec<usize> {
        (1..=self.dim).filter(|&k| self.mc[k - 1].is_zero()).collect()
    }

    pub fn parse_form(&self, src: &str) -> Result<Form, ExprError> {
        parse_form(src, self)
    }

    /// Multi-line listing `d w1 = ...`, one generator per line, zeros omitted.
    pub fn mc_display(&self) -> String {
        let names = self.names();
        let mut lines = Vec::new();
        for (k, f) in self.mc.iter().enumerate() {
            if !f.is_zero() {
                lines.push(format!("d{} = {}", names.label(k + 1), f.display_with(names)));
            }
        }
        lines.join("\n")
    }

    /// Deterministic admissible parameter points built from ratios of
    /// consecutive primes. `accept` can reject further points (for instance
    /// those where a downstream polynomial vanishes).
    pub fn canonical_samples(&self, count: usize, accept: impl Fn(&Bindings) -> bool) -> Vec<Bindings> {
        let seq = prime_ratios(count * 4 + self.params.len() * 4 + 64);
        let mut out = Vec::new();
        let mut offset = 0;
        while out.len() < count && offset + self.params.len() < seq.len() {
            let b: Bindings =
                self.params.iter().enumerate().map(|(i, p)| (p.var.clone(), seq[offset + i].clone())).collect();
            offset += 1;
            if self.check_constraints(&b).is_ok() && accept(&b) {
                out.push(b);
            }
            if self.params.is_empty() {
                break;
            }
        }
        out
    }
}

impl FormScope for AlgebraDef {
    fn dim(&self) -> usize {
        self.dim
    }

    fn names(&self) -> BasisNames {
        self.meta.names
    }

    fn resolve_scalar(&self, name: &str) -> Result<Var, String> {
        if let Some(v) = self.param(name) {
            return Ok(v.clone());
        }
        if Var::looks_like_coefficient(name) {
            return Ok(Var::coef(name));
        }
        Err(format!("'{name}' is not a parameter of {}", self.name))
    }

    fn differential(&self, f: &Form) -> Result<Form, String> {
        AlgebraDef::differential(self, f).map_err(|e| e.to_string())
    }
}

/// `2, 3/2, 5/3, 7/5, 11/7, ...`: pairwise distinct, all greater than 1.
pub fn prime_ratios(n: usize) -> Vec<Rational> {
    let mut primes: Vec<i64> = vec![1];
    let mut k = 2i64;
    while primes.len() <= n {
        if (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0) {
            primes.push(k);
        }
        k += 1;
    }
    primes.windows(2).map(|w| Rational::new(w[1].into(), w[0].into())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn a32() -> AlgebraDef {
        let scope = PlainScope { dim: 3, names: BasisNames::Omega };
        let mc = vec![
            parse_form("w1^w3 + w2^w3", &scope).unwrap(),
            parse_form("w2^w3", &scope).unwrap(),
            Form::zero(3),
        ];
        AlgebraDef::new("A3_2", vec![], vec![], mc, AlgebraMeta::default()).unwrap()
    }

    #[test]
    fn differential_leibniz_sign() {
        let g = a32();
        let f = g.parse_form("w1^w2").unwrap();
        // d(w1^w2) = dw1^w2 - w1^dw2 = w2^w3^w2*0 + w1^w3^w2 - w1^w2^w3
        assert_eq!(g.differential(&f).unwrap().to_string(), "-2*(w1^w2^w3)");
        assert!(g.jacobi_check(&[]).unwrap().passed());
    }

    #[test]
    fn corrupted_copy_fails_jacobi() {
        let mut g = a32();
        g.mc[2] = g.parse_form("w1^w2").unwrap();
        let r = g.jacobi_check(&[]).unwrap();
        assert!(!r.passed());
        assert_eq!(r.failures[0].0, 3);
        assert_eq!(r.failures[0].1.to_string(), "-2*(w1^w2^w3)");
    }

    #[test]
    fn structure_constants_round_trip() {
        let g = a32();
        let sc = g.structure_constants();
        assert_eq!(sc.entries[&(1, 3, 1)], RatFunc::int(-1));
        assert_eq!(AlgebraDef::mc_from_structure_constants(&sc).unwrap(), g.mc);
    }

    #[test]
    fn prime_ratio_sequence() {
        let s = prime_ratios(5);
        assert_eq!(s, vec![rat(2, 1), rat(3, 2), rat(5, 3), rat(7, 5), rat(11, 7)]);
    }

    #[test]
    fn relabel_rejects_non_permutations() {
        assert!(a32().relabel(&[1, 1, 2]).is_err());
        let r = a32().relabel(&[3, 2, 1]).unwrap();
        assert!(r.jacobi_check(&[]).unwrap().passed());
        assert_eq!(r.mc[2].to_string(), "-(w1^w2) - (w1^w3)");
    }
}
