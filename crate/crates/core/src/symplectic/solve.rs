//! The closure system and its parametric elimination.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::algebra::{AlgebraDef, AlgebraError};
use crate::exterior::Form;
use crate::ring::{split_factors, Poly, RatFunc, Var};

use super::{Assumption, BranchCondition, ClosureSolution, GenericTwoForm, Mode, Result, SymplecticError};

/// A point in the branch tree: an algebra specialized by the zero
/// conditions so far, plus the nonzero assumptions in its parameters.
#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub alg: AlgebraDef,
    pub branch: Vec<BranchCondition>,
    pub subs: BTreeMap<Var, Poly>,
    pub nonzero: Vec<Poly>,
    pub depth: usize,
    pub cap: usize,
}

pub(crate) enum Child {
    Node(Node),
    /// The zero condition could not be solved for a parameter.
    Unresolved(Node, Poly),
}

impl Node {
    pub fn root(alg: &AlgebraDef) -> Node {
        Node {
            alg: alg.clone(),
            branch: Vec::new(),
            subs: BTreeMap::new(),
            nonzero: Vec::new(),
            depth: 0,
            cap: 3 * alg.params.len() + 4,
        }
    }

    /// Canonical irreducible-ish factors known to be nonzero.
    pub fn known(&self) -> Vec<Poly> {
        let mut k: Vec<Poly> = Vec::new();
        for p in self.alg.constraints.iter().chain(&self.nonzero) {
            for f in split_factors(p) {
                if !k.contains(&f) {
                    k.push(f);
                }
            }
        }
        k
    }

    pub fn is_known(&self, p: &Poly) -> bool {
        is_known_in(p, &self.known())
    }

    /// Adds `f != 0` for each factor.
    pub fn assume_nonzero(&mut self, factors: &[Poly]) {
        for f in factors {
            let c = BranchCondition::new(f, Assumption::Nonzero);
            if !self.branch.contains(&c) {
                self.branch.push(c);
            }
            self.nonzero.push(f.canonical());
        }
    }

    /// Children covering the parameter space of `self`: all factors nonzero,
    /// then for each `i` the first `i` nonzero and factor `i` zero.
    pub fn split(&self, factors: &[Poly]) -> Result<Vec<Child>> {
        let mut out = Vec::new();
        let mut all = self.clone();
        all.depth += 1;
        all.assume_nonzero(factors);
        out.push(Child::Node(all));
        for (i, f) in factors.iter().enumerate() {
            let mut base = self.clone();
            base.depth += 1;
            base.assume_nonzero(&factors[..i]);
            base.branch.push(BranchCondition::new(f, Assumption::Zero));
            let Some((v, value)) = solve_for_parameter(f) else {
                out.push(Child::Unresolved(base, f.canonical()));
                continue;
            };
            let sub: BTreeMap<Var, Poly> = [(v.clone(), value.clone())].into();
            let alg = match base.alg.specialize(&sub) {
                Ok(a) => a,
                Err(AlgebraError::ConstraintViolated { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let mut nonzero = Vec::new();
            let mut feasible = true;
            for p in &base.nonzero {
                let q = p.substitute(&sub);
                if q.is_zero() {
                    feasible = false;
                    break;
                }
                if !q.is_constant() {
                    nonzero.push(q.canonical());
                }
            }
            if !feasible {
                continue;
            }
            let mut subs: BTreeMap<Var, Poly> = base.subs.iter().map(|(k, p)| (k.clone(), p.substitute(&sub))).collect();
            subs.insert(v, value);
            out.push(Child::Node(Node { alg, subs, nonzero, ..base }));
        }
        Ok(out)
    }
}

fn is_known_in(p: &Poly, known: &[Poly]) -> bool {
    p.is_constant() || split_factors(p).iter().all(|f| known.contains(f) || has_no_real_zero(f))
}

/// Positive constant plus even powers with positive coefficients, such as
/// `beta^2 + 1`: no real zero.
pub(crate) fn has_no_real_zero(p: &Poly) -> bool {
    let p = p.canonical();
    let positive = |c: &crate::ring::Rational| num_traits::Signed::is_positive(c);
    p.constant_value().is_some_and(|c| positive(&c))
        || (p.terms().any(|(m, _)| m.is_one())
            && p.terms().all(|(m, c)| positive(c) && m.powers().iter().all(|(_, e)| e % 2 == 0)))
}

/// Solves `f = 0` for the last parameter (in declaration order) that occurs
/// linearly with a constant coefficient.
pub(crate) fn solve_for_parameter(f: &Poly) -> Option<(Var, Poly)> {
    for v in f.vars().into_iter().rev() {
        if f.degree_in(&v) != 1 {
            continue;
        }
        let cs = f.coeffs_in(&v);
        let Some(c) = cs[1].constant_value() else { continue };
        let value = cs[0].scale(&(-c.recip()));
        return Some((v, value));
    }
    None
}

/// The closure system: column `c` holds the coordinates of `d(w_i ^ w_j)`
/// for the `c`-th pair, one row per 3-form basis element that occurs.
pub(crate) fn closure_matrix(alg: &AlgebraDef) -> Result<(GenericTwoForm, Vec<Vec<RatFunc>>)> {
    let g = GenericTwoForm::new(alg.dim);
    let mut images = Vec::with_capacity(g.coeffs.len());
    for (i, j, _) in &g.coeffs {
        images.push(alg.differential(&Form::term(alg.dim, &[*i, *j], RatFunc::one())?)?);
    }
    let mut triples: Vec<Vec<u8>> = images.iter().flat_map(|f| f.terms().map(|(k, _)| k.to_vec())).collect();
    triples.sort();
    triples.dedup();
    let rows = triples
        .iter()
        .map(|t| {
            let idx: Vec<usize> = t.iter().map(|&x| x as usize).collect();
            images.iter().map(|f| f.coefficient(&idx)).collect()
        })
        .collect();
    Ok((g, rows))
}

/// Reduced row echelon form of the closure system.
pub(crate) struct Elimination {
    pub generic: GenericTwoForm,
    /// `(column, normalized row)` per pivot, in elimination order.
    pub pivots: Vec<(usize, Vec<RatFunc>)>,
    pub pivot_polys: Vec<Poly>,
    /// Unknown pivot factors accepted without splitting.
    pub assumed: Vec<Poly>,
}

pub(crate) enum Outcome {
    Done(Elimination),
    /// The best remaining pivot has these factors of unknown sign.
    Split(Vec<Poly>),
}

/// Priority of a pivot: constants, then pivots whose numerator factors are
/// all known nonzero, then the rest.
fn class(entry: &RatFunc, known: &[Poly]) -> u8 {
    let n = entry.num();
    if n.is_constant() {
        0
    } else if is_known_in(n, known) {
        1
    } else {
        2
    }
}

pub(crate) fn eliminate(alg: &AlgebraDef, known: &[Poly], accept_unknown: bool) -> Result<Outcome> {
    let (generic, mut rows) = closure_matrix(alg)?;
    let ncols = generic.coeffs.len();
    let mut known = known.to_vec();
    let mut row_used = vec![false; rows.len()];
    let mut col_used = vec![false; ncols];
    let mut pivots = Vec::new();
    let mut pivot_polys = Vec::new();
    let mut assumed = Vec::new();
    loop {
        // (class, canonical numerator, column, row)
        let mut best: Option<(u8, Poly, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            if row_used[r] {
                continue;
            }
            for (c, e) in row.iter().enumerate() {
                if col_used[c] || e.is_zero() {
                    continue;
                }
                let cand = (class(e, &known), e.num().canonical(), c, r);
                let better = match &best {
                    None => true,
                    Some(b) => cand
                        .0
                        .cmp(&b.0)
                        .then_with(|| cand.1.pivot_cmp(&b.1))
                        .then_with(|| b.2.cmp(&cand.2))
                        .then_with(|| cand.3.cmp(&b.3))
                        == Ordering::Less,
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let Some((cls, num, c, r)) = best else { break };
        if cls == 2 {
            let unknown: Vec<Poly> = split_factors(&num).into_iter().filter(|f| !known.contains(f)).collect();
            if !accept_unknown {
                return Ok(Outcome::Split(unknown));
            }
            for f in unknown {
                assumed.push(f.clone());
                known.push(f);
            }
        }
        let inv = rows[r][c].recip()?;
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        let prow = rows[r].clone();
        for (rr, row) in rows.iter_mut().enumerate() {
            if rr == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (k, x) in row.iter_mut().enumerate() {
                if !prow[k].is_zero() {
                    *x = &*x - &(&f * &prow[k]);
                }
            }
        }
        row_used[r] = true;
        col_used[c] = true;
        pivot_polys.push(num);
        pivots.push((c, r));
    }
    let pivots = pivots.into_iter().map(|(c, r)| (c, std::mem::take(&mut rows[r]))).collect();
    Ok(Outcome::Done(Elimination { generic, pivots, pivot_polys, assumed }))
}

/// Turns an elimination into a solution record and re-checks closure.
pub(crate) fn finish(node: &Node, e: Elimination, truncated: bool, unresolved: Option<Poly>) -> Result<ClosureSolution> {
    let g = &e.generic;
    let pivot_cols: Vec<usize> = e.pivots.iter().map(|(c, _)| *c).collect();
    let free_cols: Vec<usize> = (0..g.coeffs.len()).filter(|c| !pivot_cols.contains(c)).collect();
    let free: Vec<Var> = free_cols.iter().map(|&c| g.coeffs[c].2.clone()).collect();
    let mut eliminated = BTreeMap::new();
    for (c, row) in &e.pivots {
        let mut acc = RatFunc::zero();
        for &f in &free_cols {
            if !row[f].is_zero() {
                acc = &acc - &(&row[f] * &RatFunc::from_poly(Poly::var(g.coeffs[f].2.clone())));
            }
        }
        eliminated.insert(g.coeffs[*c].2.clone(), acc);
    }
    let dim = node.alg.dim;
    let mut kernel_basis = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        let (fi, fj, _) = &g.coeffs[f];
        let mut k = Form::term(dim, &[*fi, *fj], RatFunc::one())?;
        for (c, row) in &e.pivots {
            if !row[f].is_zero() {
                let (i, j, _) = &g.coeffs[*c];
                k = k.add(&Form::term(dim, &[*i, *j], -&row[f])?)?;
            }
        }
        kernel_basis.push(k);
    }
    let mut node = node.clone();
    let depth = node.depth;
    node.assume_nonzero(&e.assumed);
    let sol = ClosureSolution {
        branch: node.branch,
        substitutions: node.subs,
        algebra: node.alg,
        free,
        kernel_basis,
        eliminated,
        pivots: e.pivot_polys,
        truncated,
        unresolved,
        depth,
    };
    let residue = sol.algebra.differential(&sol.general_element())?;
    if !residue.is_zero() {
        return Err(SymplecticError::Construction(format!(
            "{}: closure residue {residue} on branch [{}]",
            sol.algebra.name,
            sol.branch_text()
        )));
    }
    Ok(sol)
}

/// Solves `node` completely, splitting on every pivot of unknown sign.
pub(crate) fn closure_leaves(node: Node, out: &mut Vec<ClosureSolution>) -> Result<()> {
    match eliminate(&node.alg, &node.known(), false)? {
        Outcome::Done(e) => out.push(finish(&node, e, false, None)?),
        Outcome::Split(factors) => {
            if node.depth >= node.cap {
                let Outcome::Done(e) = eliminate(&node.alg, &node.known(), true)? else { unreachable!() };
                out.push(finish(&node, e, true, None)?);
                return Ok(());
            }
            for child in node.split(&factors)? {
                match child {
                    Child::Node(n) => closure_leaves(n, out)?,
                    Child::Unresolved(n, p) => {
                        let Outcome::Done(e) = eliminate(&n.alg, &n.known(), true)? else { unreachable!() };
                        out.push(finish(&n, e, false, Some(p))?);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Closed 2-forms of `alg`: one solution in generic and instantiated mode,
/// the leaves of the branch tree in branching mode.
pub fn solve_closed_space(alg: &AlgebraDef, mode: Mode) -> Result<Vec<ClosureSolution>> {
    let root = Node::root(alg);
    match mode {
        Mode::Instantiated => {
            if !alg.params.is_empty() {
                let names: Vec<&str> = alg.params.iter().map(|p| p.var.name()).collect();
                return Err(SymplecticError::ResidualParameters { name: alg.name.clone(), params: names.join(", ") });
            }
            let Outcome::Done(e) = eliminate(alg, &[], true)? else { unreachable!() };
            Ok(vec![finish(&root, e, false, None)?])
        }
        Mode::Generic => {
            let Outcome::Done(e) = eliminate(alg, &root.known(), true)? else { unreachable!() };
            Ok(vec![finish(&root, e, false, None)?])
        }
        Mode::Branching => {
            let mut out = Vec::new();
            closure_leaves(root, &mut out)?;
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Catalog;
    use crate::ring::parse_poly;

    fn cat() -> Catalog {
        Catalog::bundled()
    }

    #[test]
    fn abelian_kernel_is_everything() {
        let a = cat().resolve("6L1").unwrap();
        let s = solve_closed_space(&a, Mode::Instantiated).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].kernel_basis.len(), 15);
        assert!(s[0].eliminated.is_empty());
    }

    #[test]
    fn instantiated_mode_rejects_parameters() {
        let a = cat().resolve("A3_4+A3_4(-1)").unwrap();
        assert!(matches!(
            solve_closed_space(&a, Mode::Instantiated),
            Err(SymplecticError::ResidualParameters { .. })
        ));
    }

    #[test]
    fn n6_1_generic_eliminations() {
        let a = cat().get("N6_1").unwrap().clone();
        let s = &solve_closed_space(&a, Mode::Generic).unwrap()[0];
        for z in ["a1_3", "a1_4", "a3_4", "a3_5", "a4_6"] {
            assert_eq!(s.eliminated.get(&Var::coef(z)), Some(&RatFunc::zero()), "{z}");
        }
        let expected = RatFunc::new(parse_poly("beta*a1_5").unwrap(), parse_poly("alpha").unwrap()).unwrap();
        assert_eq!(s.eliminated[&Var::coef("a1_6")], expected);
        assert!(s.pivots.contains(&parse_poly("alpha").unwrap()));
    }

    #[test]
    fn solving_for_a_parameter() {
        let f = parse_poly("alpha + gamma").unwrap();
        let (v, val) = solve_for_parameter(&f).unwrap();
        assert_eq!(v.name(), "gamma");
        assert_eq!(val.to_string(), "-alpha");
        assert!(solve_for_parameter(&parse_poly("alpha*beta - 1").unwrap()).is_none());
    }

    #[test]
    fn definite_polynomials() {
        assert!(has_no_real_zero(&parse_poly("beta^2 + 1").unwrap()));
        assert!(has_no_real_zero(&parse_poly("-beta^2 - 2*gamma^4 - 3").unwrap()));
        assert!(!has_no_real_zero(&parse_poly("beta^2 - 1").unwrap()));
        assert!(!has_no_real_zero(&parse_poly("beta^2 + gamma^2").unwrap()));
        assert!(!has_no_real_zero(&parse_poly("beta + 1").unwrap()));
    }
}
