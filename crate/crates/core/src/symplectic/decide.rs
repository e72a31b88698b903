//! Nondegeneracy of the general closed 2-form and the per-branch verdict.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::Serialize;

use crate::algebra::{prime_ratios, AlgebraDef, Bindings};
use crate::exterior::Form;
use crate::ring::{gcd, lcm, split_factors, Monomial, Poly, RatFunc, Rational, Var};

use super::solve::{closure_leaves, eliminate, finish, Child, Node, Outcome};
use super::{
    exact::j0_generic, relabel_coefficients, solve_closed_space, BranchCondition, ClosureSolution, Mode, Result,
    SymplecticError,
};

/// Verdict for one branch of the parameter space.
#[derive(Clone, Debug, Serialize)]
pub struct SymplecticReport {
    pub algebra: String,
    /// Parameters still free on this branch.
    pub params: Vec<String>,
    pub branch: Vec<BranchCondition>,
    #[serde(serialize_with = "ser_subs")]
    pub substitutions: BTreeMap<Var, Poly>,
    pub closed_space_dim: usize,
    /// Volume coefficient of the top power of the general closed 2-form,
    /// denominators cleared, in the free `a{i}_{j}`.
    #[serde(serialize_with = "ser_display")]
    pub nondeg_poly: Poly,
    pub symplectic: bool,
    #[serde(serialize_with = "ser_opt_display")]
    pub witness: Option<Form>,
    /// Parameter values at which the witness lives, original names.
    #[serde(serialize_with = "ser_bindings")]
    pub witness_params: Bindings,
    pub exact_symplectic: bool,
    pub j0: usize,
    pub truncated: bool,
    pub unresolved: bool,
    pub notes: Vec<String>,
}

impl SymplecticReport {
    pub fn branch_text(&self) -> String {
        self.branch.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    }

    /// The nondegeneracy polynomial with block labels on nilradical bases.
    pub fn nondeg_display(&self, alg: &AlgebraDef) -> String {
        relabel_coefficients(&self.nondeg_poly.to_string(), alg.names())
    }

    /// Whether a full binding of the original parameters lies on this branch.
    pub fn contains(&self, b: &Bindings) -> bool {
        self.branch.iter().all(|c| c.holds_at(b) == Some(true))
    }
}

fn ser_display<T: Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_display<T: Display, S: serde::Serializer>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_subs<S: serde::Serializer>(m: &BTreeMap<Var, Poly>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.name().to_string(), v.to_string())))
}

fn ser_bindings<S: serde::Serializer>(m: &Bindings, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.name().to_string(), v.to_string())))
}

/// Top-power volume coefficient of the general element, with the
/// parameter denominators cleared. Returns `(poly, cleared denominator)`.
pub fn nondegeneracy(sol: &ClosureSolution) -> Result<(Poly, Poly)> {
    let g = sol.general_element();
    let mut l = Poly::one();
    for (_, c) in g.terms() {
        l = lcm(&l, c.den());
    }
    let g = g.scale(&RatFunc::from_poly(l.clone()));
    let top = g.top_power(sol.algebra.dim / 2)?.volume_coefficient();
    Ok((top.num().clone(), l))
}

/// Greatest common divisor of the coefficients of `p` viewed as a
/// polynomial in its form coefficients over the parameters.
pub(crate) fn parameter_content(p: &Poly) -> Poly {
    let mut groups: BTreeMap<Monomial, Vec<(Monomial, Rational)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let (params, coefs): (Vec<_>, Vec<_>) = m.powers().iter().cloned().partition(|(v, _)| v.is_param());
        groups.entry(Monomial::from_powers(coefs)).or_default().push((Monomial::from_powers(params), c.clone()));
    }
    let mut g = Poly::zero();
    for (_, ts) in groups {
        g = gcd(&g, &Poly::from_terms(ts));
        if g.is_constant() {
            return Poly::one();
        }
    }
    g.canonical()
}

/// Symplectic verdict per branch. Odd dimensions are refused.
pub fn decide_symplectic(alg: &AlgebraDef, mode: Mode) -> Result<Vec<SymplecticReport>> {
    if alg.dim % 2 == 1 {
        return Err(SymplecticError::OddDimension { name: alg.name.clone(), dim: alg.dim });
    }
    let mut out = Vec::new();
    match mode {
        Mode::Branching => explore(Node::root(alg), &mut out)?,
        Mode::Generic | Mode::Instantiated => {
            for mut sol in solve_closed_space(alg, mode)? {
                let (nondeg, _) = nondegeneracy(&sol)?;
                let content = parameter_content(&nondeg);
                let mut notes = Vec::new();
                if !nondeg.is_zero() && !content.is_constant() {
                    let node = node_of(&sol, 0);
                    let unknown: Vec<Poly> = split_factors(&content).into_iter().filter(|f| !node.is_known(f)).collect();
                    for f in &unknown {
                        notes.push(format!("assumed {f} != 0 (factor of the nondegeneracy polynomial)"));
                        sol.branch.push(BranchCondition::new(f, super::Assumption::Nonzero));
                    }
                }
                out.push(report(&sol, nondeg, notes)?);
            }
        }
    }
    Ok(out)
}

fn node_of(sol: &ClosureSolution, depth: usize) -> Node {
    let mut n = Node::root(&sol.algebra);
    n.branch = sol.branch.clone();
    n.subs = sol.substitutions.clone();
    n.nonzero = sol.nonzero_conditions();
    n.depth = depth;
    n
}

fn explore(node: Node, out: &mut Vec<SymplecticReport>) -> Result<()> {
    let cap = node.cap;
    let mut leaves = Vec::new();
    closure_leaves(node, &mut leaves)?;
    for leaf in leaves {
        let (nondeg, _) = nondegeneracy(&leaf)?;
        if nondeg.is_zero() || leaf.truncated || leaf.unresolved.is_some() {
            out.push(report(&leaf, nondeg, Vec::new())?);
            continue;
        }
        let mut n = node_of(&leaf, leaf.depth);
        n.cap = cap;
        let content = parameter_content(&nondeg);
        let unknown: Vec<Poly> = split_factors(&content).into_iter().filter(|f| !n.is_known(f)).collect();
        if unknown.is_empty() {
            out.push(report(&leaf, nondeg, Vec::new())?);
            continue;
        }
        if n.depth >= cap {
            let mut leaf = leaf.clone();
            leaf.truncated = true;
            let notes = unknown.iter().map(|f| format!("assumed {f} != 0 (split cap reached)")).collect();
            for f in &unknown {
                leaf.branch.push(BranchCondition::new(f, super::Assumption::Nonzero));
            }
            out.push(report(&leaf, nondeg, notes)?);
            continue;
        }
        for child in n.split(&unknown)? {
            match child {
                Child::Node(c) => explore(c, out)?,
                Child::Unresolved(c, p) => {
                    let Outcome::Done(e) = eliminate(&c.alg, &c.known(), true)? else { unreachable!() };
                    let sol = finish(&c, e, false, Some(p))?;
                    let (nd, _) = nondegeneracy(&sol)?;
                    out.push(report(&sol, nd, Vec::new())?);
                }
            }
        }
    }
    Ok(())
}

fn report(sol: &ClosureSolution, nondeg: Poly, mut notes: Vec<String>) -> Result<SymplecticReport> {
    let alg = &sol.algebra;
    let symplectic = !nondeg.is_zero();
    if sol.truncated {
        notes.push("branch cap reached; remaining pivots assumed nonzero".into());
    }
    if let Some(p) = &sol.unresolved {
        notes.push(format!("zero condition {p} = 0 could not be solved for a parameter; generic kernel used"));
    }
    let (witness, witness_params) = if symplectic { find_witness(sol, &nondeg)? } else { (None, Bindings::new()) };
    if symplectic && witness.is_none() {
        notes.push("no witness found among the canonical samples".into());
    }
    let j0 = j0_generic(alg)?;
    Ok(SymplecticReport {
        algebra: alg.name.clone(),
        params: alg.params.iter().map(|p| p.var.name().to_string()).collect(),
        branch: sol.branch.clone(),
        substitutions: sol.substitutions.clone(),
        closed_space_dim: sol.free.len(),
        nondeg_poly: nondeg,
        symplectic,
        witness,
        witness_params,
        exact_symplectic: 2 * j0 == alg.dim,
        j0,
        truncated: sol.truncated,
        unresolved: sol.unresolved.is_some(),
        notes,
    })
}

/// First canonical sample at which the general element is nondegenerate,
/// re-verified on the instantiated algebra (closed, full rank).
fn find_witness(sol: &ClosureSolution, nondeg: &Poly) -> Result<(Option<Form>, Bindings)> {
    let alg = &sol.algebra;
    let g = sol.general_element();
    let content = parameter_content(nondeg);
    let mut guards: Vec<Poly> = sol.nonzero_conditions();
    guards.push(content);
    for (_, c) in g.terms() {
        guards.push(c.den().clone());
    }
    let admissible = |b: &Bindings| guards.iter().all(|p| p.evaluate_full(b).is_some_and(|v| !num_traits::Zero::is_zero(&v)));
    let samples = alg.canonical_samples(3, admissible);
    let seq = prime_ratios(sol.free.len() + 64);
    for b in samples {
        for offset in 0..64 {
            let mut full = b.clone();
            for (k, v) in sol.free.iter().enumerate() {
                full.insert(v.clone(), seq[offset + k].clone());
            }
            let val = nondeg.evaluate_full(&full);
            if val.is_none_or(|v| num_traits::Zero::is_zero(&v)) {
                continue;
            }
            let w = g.evaluate(&full)?;
            let names: BTreeMap<String, Rational> = b.iter().map(|(k, v)| (k.name().to_string(), v.clone())).collect();
            let inst = alg.instantiate(&names)?;
            if !inst.differential(&w)?.is_zero() || w.rank_of_two_form(&Bindings::new())? != alg.dim {
                return Err(SymplecticError::Construction(format!("witness {w} of {} failed re-verification", alg.name)));
            }
            let mut params = b.clone();
            for (v, p) in &sol.substitutions {
                if let Some(x) = p.evaluate_full(&b) {
                    params.insert(v.clone(), x);
                }
            }
            return Ok((Some(w), params));
        }
    }
    Ok((None, Bindings::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Catalog;
    use crate::ring::parse_poly;

    #[test]
    fn content_over_parameters() {
        let p = parse_poly("alpha*beta*a1_5*a3_6 + alpha*a2_4*a3_6").unwrap();
        assert_eq!(parameter_content(&p).to_string(), "alpha");
    }

    #[test]
    fn a3_4_pair_is_symplectic_and_a3_3_pair_is_not() {
        let c = Catalog::bundled();
        let a = c.resolve("A3_4(-1)+A3_4(-1)").unwrap();
        let r = decide_symplectic(&a, Mode::Instantiated).unwrap();
        assert!(r[0].symplectic);
        assert!(r[0].witness.is_some());
        assert!(!r[0].exact_symplectic);
        let b = c.resolve("A3_3+A3_3").unwrap();
        let r = decide_symplectic(&b, Mode::Instantiated).unwrap();
        assert!(!r[0].symplectic);
        assert!(r[0].nondeg_poly.is_zero());
    }

    #[test]
    fn odd_dimension_is_refused() {
        let c = Catalog::bundled();
        let a = c.get("A3_3").unwrap();
        assert!(matches!(decide_symplectic(a, Mode::Generic), Err(SymplecticError::OddDimension { .. })));
    }

    #[test]
    fn n6_1_branches() {
        let c = Catalog::bundled();
        let a = c.get("N6_1").unwrap();
        let reports = decide_symplectic(a, Mode::Branching).unwrap();
        let mut found: Vec<String> = reports
            .iter()
            .filter(|r| r.symplectic)
            .map(|r| {
                let show = |n: &str| {
                    r.substitutions.get(&Var::param(n)).map_or(n.to_string(), |p| p.to_string())
                };
                format!("({},{})", show("gamma"), show("delta"))
            })
            .collect();
        found.sort();
        assert_eq!(found, ["(-1,0)", "(-alpha,-beta)", "(0,-1)"], "{reports:#?}");
    }
}
