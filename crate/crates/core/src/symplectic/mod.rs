//! Closed 2-forms, nondegeneracy, exactness and the two direct-sum / contact
//! constructions.
//!
//! The closure condition `d(sum a_ij w_i^w_j) = 0` is linear in the `a_ij`
//! with coefficients in the parameters of the algebra. It is solved by exact
//! Gaussian elimination over the field of rational functions; in branching
//! mode every pivot that might vanish splits the parameter space.

mod construct;
mod decide;
mod exact;
mod solve;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraDef, AlgebraError, Bindings};
use crate::exterior::{BasisNames, ExteriorError, Form};
use crate::ring::{Poly, RatFunc, RingError, Var};

pub use construct::{contact_candidate, is_contact, prop2_combine};
pub use decide::{decide_symplectic, nondegeneracy, SymplecticReport};
pub use exact::{decide_exact_symplectic, exact_space, j0, j0_generic};
pub use solve::solve_closed_space;
pub use verify::{verify_table_entry, TableVerdict, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("{name}: instantiated mode needs values for {params}")]
    ResidualParameters { name: String, params: String },
    #[error("{name} has odd dimension {dim}; use contact analysis instead")]
    OddDimension { name: String, dim: usize },
    #[error("{name} has even dimension {dim}; expected an odd-dimensional algebra")]
    EvenDimension { name: String, dim: usize },
    #[error("{name}: d w{index} is not zero")]
    NotClosedGenerator { name: String, index: usize },
    #[error("condition {number} fails: {detail}")]
    Condition { number: u8, detail: String },
    #[error("theta is not {combo} in L(g): difference {difference}")]
    Membership { combo: String, difference: String },
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error("basis index {index} out of range for dimension {dim}")]
    BadIndex { index: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, SymplecticError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every pivot is assumed nonzero and recorded.
    Generic,
    /// Pivots that may vanish split the parameter space.
    Branching,
    /// Parameter-free algebras only.
    Instantiated,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "generic" => Ok(Mode::Generic),
            "branching" => Ok(Mode::Branching),
            "instantiated" => Ok(Mode::Instantiated),
            other => Err(format!("unknown mode '{other}' (generic, branching, instantiated)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assumption {
    Nonzero,
    Zero,
}

/// `poly != 0` or `poly = 0`; `poly` is canonical and non-constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchCondition {
    pub poly: Poly,
    pub assumption: Assumption,
}

impl BranchCondition {
    pub fn new(poly: &Poly, assumption: Assumption) -> Self {
        BranchCondition { poly: poly.canonical(), assumption }
    }

    /// Whether a full binding of the parameters satisfies the condition.
    pub fn holds_at(&self, b: &Bindings) -> Option<bool> {
        let v = self.poly.evaluate_full(b)?;
        Some(match self.assumption {
            Assumption::Nonzero => !num_traits::Zero::is_zero(&v),
            Assumption::Zero => num_traits::Zero::is_zero(&v),
        })
    }
}

impl fmt::Display for BranchCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.assumption {
            Assumption::Nonzero => "!=",
            Assumption::Zero => "=",
        };
        write!(f, "{} {op} 0", self.poly)
    }
}

impl Serialize for BranchCondition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BranchCondition", 2)?;
        st.serialize_field("poly", &self.poly.to_string())?;
        st.serialize_field("assumption", &self.assumption)?;
        st.end()
    }
}

/// `sum_{i<j} a{i}_{j} w_i ^ w_j` with one fresh coefficient per pair.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericTwoForm {
    pub form: Form,
    /// `(i, j, a{i}_{j})` in lexicographic order of `(i, j)`.
    pub coeffs: Vec<(usize, usize, Var)>,
}

impl GenericTwoForm {
    pub fn new(dim: usize) -> Self {
        let mut coeffs = Vec::new();
        let mut form = Form::zero(dim);
        for i in 1..=dim {
            for j in i + 1..=dim {
                let v = Var::coef(&format!("a{i}_{j}"));
                let t = Form::term(dim, &[i, j], RatFunc::from_poly(Poly::var(v.clone()))).expect("indices in range");
                form = form.add(&t).expect("same dimension");
                coeffs.push((i, j, v));
            }
        }
        GenericTwoForm { form, coeffs }
    }

    pub fn pair_of(&self, v: &Var) -> Option<(usize, usize)> {
        self.coeffs.iter().find(|(_, _, w)| w == v).map(|(i, j, _)| (*i, *j))
    }
}

/// The closed 2-forms of one branch of the parameter space.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureSolution {
    /// Conditions in the order they were imposed.
    pub branch: Vec<BranchCondition>,
    /// Parameters eliminated by zero conditions, in terms of the rest.
    pub substitutions: BTreeMap<Var, Poly>,
    /// The algebra with `substitutions` applied.
    pub algebra: AlgebraDef,
    /// Kernel coordinates, one per non-pivot coefficient.
    pub free: Vec<Var>,
    /// `kernel_basis[k]` sets `free[k] = 1` and the other free coefficients to 0.
    pub kernel_basis: Vec<Form>,
    /// Pivot coefficients as linear combinations of the free ones.
    pub eliminated: BTreeMap<Var, RatFunc>,
    /// Numerators of the pivots used, in elimination order.
    pub pivots: Vec<Poly>,
    /// The branch needed more splits than the cap allows; the remaining
    /// pivots were assumed nonzero.
    pub truncated: bool,
    /// A zero condition that could not be solved for a parameter; the
    /// kernel is the generic one and does not honour it.
    pub unresolved: Option<Poly>,
    /// Number of splits above this leaf.
    pub depth: usize,
}

impl ClosureSolution {
    /// The general closed 2-form: free coefficients stay symbolic.
    pub fn general_element(&self) -> Form {
        let dim = self.algebra.dim;
        let g = GenericTwoForm::new(dim);
        let mut out = Form::zero(dim);
        for (i, j, v) in &g.coeffs {
            let c = match self.eliminated.get(v) {
                Some(e) => e.clone(),
                None => RatFunc::from_poly(Poly::var(v.clone())),
            };
            if !c.is_zero() {
                out = out.add(&Form::term(dim, &[*i, *j], c).expect("indices in range")).expect("same dimension");
            }
        }
        out
    }

    /// Nonzero conditions, after all substitutions, in the remaining parameters.
    pub fn nonzero_conditions(&self) -> Vec<Poly> {
        self.branch
            .iter()
            .filter(|c| c.assumption == Assumption::Nonzero)
            .map(|c| c.poly.substitute(&self.substitutions))
            .filter(|p| !p.is_constant())
            .collect()
    }

    /// Whether a full binding of the original parameters lies in this branch.
    pub fn contains(&self, b: &Bindings) -> bool {
        self.branch.iter().all(|c| c.holds_at(b) == Some(true))
    }

    /// `"gamma != 0, delta = 0, gamma + 1 = 0"`; empty for the whole space.
    pub fn branch_text(&self) -> String {
        self.branch.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    }
}

/// Human label for a generic coefficient. On algebras with a nilradical
/// basis `e1..ek, w1..` the three blocks read `a^ij` (both in the
/// nilradical), `b^ik` (mixed) and `c^kl` (both outside).
pub fn coefficient_label(v: &Var, names: BasisNames) -> String {
    let Some((i, j)) = parse_pair(v.name()) else { return v.name().to_string() };
    match names {
        BasisNames::Nilradical(k) if j <= k => format!("a^{i}{j}"),
        BasisNames::Nilradical(k) if i <= k => format!("b^{i}{}", j - k),
        BasisNames::Nilradical(k) => format!("c^{}{}", i - k, j - k),
        BasisNames::Omega => v.name().to_string(),
    }
}

fn parse_pair(name: &str) -> Option<(usize, usize)> {
    let (i, j) = name.strip_prefix('a')?.split_once('_')?;
    Some((i.parse().ok()?, j.parse().ok()?))
}

/// Rewrites the generic `a{i}_{j}` in a polynomial's display with
/// [`coefficient_label`].
pub fn relabel_coefficients(text: &str, names: BasisNames) -> String {
    if names == BasisNames::Omega {
        return text.to_string();
    }
    let mut out = String::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut k = 0;
    while k < bytes.len() {
        let boundary = k == 0 || !(bytes[k - 1].is_ascii_alphanumeric() || bytes[k - 1] == '_');
        if boundary && bytes[k] == 'a' {
            let end = (k + 1..bytes.len())
                .find(|&e| !(bytes[e].is_ascii_digit() || bytes[e] == '_'))
                .unwrap_or(bytes.len());
            let word: String = bytes[k..end].iter().collect();
            if parse_pair(&word).is_some() {
                out.push_str(&coefficient_label(&Var::coef(&word), names));
                k = end;
                continue;
            }
        }
        out.push(bytes[k]);
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_form_has_one_fresh_coefficient_per_pair() {
        let g = GenericTwoForm::new(6);
        assert_eq!(g.coeffs.len(), 15);
        assert_eq!(g.form.num_terms(), 15);
        assert_eq!(g.pair_of(&Var::coef("a2_5")), Some((2, 5)));
    }

    #[test]
    fn nilradical_labels() {
        let n = BasisNames::Nilradical(4);
        assert_eq!(coefficient_label(&Var::coef("a1_3"), n), "a^13");
        assert_eq!(coefficient_label(&Var::coef("a3_5"), n), "b^31");
        assert_eq!(coefficient_label(&Var::coef("a4_6"), n), "b^42");
        assert_eq!(coefficient_label(&Var::coef("a5_6"), n), "c^12");
        assert_eq!(relabel_coefficients("a1_5*a3_6 - a5_6", n), "b^11*b^32 - c^12");
    }
}
