//! Exterior algebra over the dual basis of an `n`-dimensional Lie algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::ring::{Poly, RatFunc, Rational, RingError, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExteriorError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("basis index {index} outside 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected a homogeneous form of grade {0}")]
    NotHomogeneous(usize),
    #[error("power {power} of a 2-form exceeds dimension {dim}")]
    PowerTooLarge { power: usize, dim: usize },
    #[error(transparent)]
    Binding(#[from] RingError),
}

/// How basis 1-forms are spelled: `w1..wn`, or `e1..ek` for a nilradical
/// block followed by `w1..` for the remaining generators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub enum BasisNames {
    #[default]
    Omega,
    Nilradical(usize),
}

impl BasisNames {
    pub fn label(&self, index: usize) -> String {
        match *self {
            BasisNames::Omega => format!("w{index}"),
            BasisNames::Nilradical(k) if index <= k => format!("e{index}"),
            BasisNames::Nilradical(k) => format!("w{}", index - k),
        }
    }

    /// Inverse of [`label`](Self::label).
    pub fn index_of(&self, label: &str) -> Option<usize> {
        let (head, digits) = label.split_at(1);
        let n: usize = digits.parse().ok()?;
        if n == 0 {
            return None;
        }
        match (*self, head) {
            (BasisNames::Omega, "w") => Some(n),
            (BasisNames::Nilradical(k), "e") if n <= k => Some(n),
            (BasisNames::Nilradical(k), "w") => Some(k + n),
            _ => None,
        }
    }
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
fn sort_sign(idx: &mut [u8]) -> Option<i32> {
    let mut sign = 1;
    // insertion sort counts transpositions
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// An element of the exterior algebra: a sparse map from strictly increasing
/// index tuples to coefficients. Terms of different grades may coexist.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    dim: usize,
    terms: BTreeMap<Vec<u8>, RatFunc>,
}

impl Form {
    pub fn zero(dim: usize) -> Self {
        Form { dim, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: RatFunc) -> Self {
        let mut f = Form::zero(dim);
        f.add_term(Vec::new(), c);
        f
    }

    /// The basis 1-form with 1-based index `i`.
    pub fn basis(dim: usize, i: usize) -> Result<Self, ExteriorError> {
        Form::term(dim, &[i], RatFunc::one())
    }

    /// `c * w_{i1} ^ ... ^ w_{ik}` for an arbitrary index order.
    pub fn term(dim: usize, indices: &[usize], c: RatFunc) -> Result<Self, ExteriorError> {
        let mut idx = Vec::with_capacity(indices.len());
        for &i in indices {
            if i == 0 || i > dim {
                return Err(ExteriorError::IndexOutOfRange { index: i, dim });
            }
            idx.push(i as u8);
        }
        let mut f = Form::zero(dim);
        if let Some(s) = sort_sign(&mut idx) {
            f.add_term(idx, if s < 0 { -c } else { c });
        }
        Ok(f)
    }

    fn add_term(&mut self, idx: Vec<u8>, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms as (1-based index tuple, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &RatFunc)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, indices: &[usize]) -> RatFunc {
        let key: Vec<u8> = indices.iter().map(|&i| i as u8).collect();
        self.terms.get(&key).cloned().unwrap_or_else(RatFunc::zero)
    }

    /// Coefficient on `w1 ^ ... ^ wn` (the fixed orientation).
    pub fn volume_coefficient(&self) -> RatFunc {
        let all: Vec<usize> = (1..=self.dim).collect();
        self.coefficient(&all)
    }

    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(Vec::len).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// True for the zero form and for forms whose terms all have grade `k`.
    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms.keys().all(|t| t.len() == k)
    }

    fn check_dim(&self, other: &Form) -> Result<(), ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, c: &RatFunc) -> Form {
        if c.is_zero() {
            return Form::zero(self.dim);
        }
        self.map_coefficients(|v| v * c)
    }

    pub fn map_coefficients<F: Fn(&RatFunc) -> RatFunc>(&self, f: F) -> Form {
        let mut out = Form::zero(self.dim);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    pub fn try_map_coefficients<F>(&self, f: F) -> Result<Form, ExteriorError>
    where
        F: Fn(&RatFunc) -> Result<RatFunc, RingError>,
    {
        let mut out = Form::zero(self.dim);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v)?);
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.check_dim(other)?;
        let mut out = Form::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut idx = Vec::with_capacity(a.len() + b.len());
                idx.extend_from_slice(a);
                idx.extend_from_slice(b);
                if let Some(s) = sort_sign(&mut idx) {
                    let c = ca * cb;
                    out.add_term(idx, if s < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `self ^ self ^ ... ^ self` (`m` factors) for a 2-form. When `2m = n`
    /// the single surviving coefficient is `m!` times the Pfaffian of the
    /// coefficient matrix.
    pub fn top_power(&self, m: usize) -> Result<Form, ExteriorError> {
        if !self.is_homogeneous(2) {
            return Err(ExteriorError::NotHomogeneous(2));
        }
        if 2 * m > self.dim {
            return Err(ExteriorError::PowerTooLarge { power: m, dim: self.dim });
        }
        let mut acc = Form::scalar(self.dim, RatFunc::one());
        for _ in 0..m {
            acc = acc.wedge(self)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn evaluate(&self, bindings: &BTreeMap<Var, Rational>) -> Result<Form, ExteriorError> {
        self.try_map_coefficients(|c| c.evaluate(bindings))
    }

    pub fn substitute(&self, subs: &BTreeMap<Var, Poly>) -> Result<Form, ExteriorError> {
        self.try_map_coefficients(|c| c.substitute(subs))
    }

    /// Re-embeds into dimension `new_dim` with every index moved up by `offset`.
    pub fn shift(&self, offset: usize, new_dim: usize) -> Result<Form, ExteriorError> {
        if self.dim + offset > new_dim {
            return Err(ExteriorError::DimensionMismatch(self.dim + offset, new_dim));
        }
        let mut out = Form::zero(new_dim);
        for (k, v) in &self.terms {
            out.add_term(k.iter().map(|i| i + offset as u8).collect(), v.clone());
        }
        Ok(out)
    }

    /// Relabels basis index `i` as `perm[i-1]` (1-based images).
    pub fn relabel(&self, perm: &[usize]) -> Result<Form, ExteriorError> {
        let mut out = Form::zero(self.dim);
        for (k, v) in &self.terms {
            let idx: Vec<usize> = k.iter().map(|&i| perm[i as usize - 1]).collect();
            out = out.add(&Form::term(self.dim, &idx, v.clone())?)?;
        }
        Ok(out)
    }

    /// Dense skew-symmetric coefficient matrix of a 2-form whose coefficients
    /// are all rational constants (`M[i][j] = c_ij`, `M[j][i] = -c_ij`).
    pub fn skew_matrix(&self) -> Result<Vec<Vec<Rational>>, ExteriorError> {
        if !self.is_homogeneous(2) {
            return Err(ExteriorError::NotHomogeneous(2));
        }
        let n = self.dim;
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (k, v) in &self.terms {
            let c = v.constant_value().ok_or_else(|| {
                let names: Vec<String> = v.vars().iter().map(|x| x.name().to_string()).collect();
                RingError::UnboundIndeterminate(names.join(", "))
            })?;
            let (i, j) = (k[0] as usize - 1, k[1] as usize - 1);
            m[j][i] = -c.clone();
            m[i][j] = c;
        }
        Ok(m)
    }

    /// Rank (always even) of a 2-form after evaluating every coefficient.
    pub fn rank_of_two_form(&self, bindings: &BTreeMap<Var, Rational>) -> Result<usize, ExteriorError> {
        let m = self.evaluate(bindings)?.skew_matrix()?;
        Ok(rational_rank(m))
    }

    pub fn display_with(&self, names: BasisNames) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (k, v)) in self.terms.iter().enumerate() {
            let basis = k.iter().map(|&j| names.label(j as usize)).collect::<Vec<_>>().join("^");
            let coef = v.to_string();
            let negative = coef.starts_with('-') && (v.is_constant() || v.num().num_terms() == 1);
            if i > 0 {
                s.push_str(if negative { " - " } else { " + " });
            } else if negative {
                s.push('-');
            }
            let c = if negative { coef[1..].to_string() } else { coef };
            if k.is_empty() {
                s.push_str(&c);
            } else if c == "1" {
                s.push_str(&format!("({basis})"));
            } else if v.is_poly() && v.num().num_terms() == 1 {
                s.push_str(&format!("{c}*({basis})"));
            } else {
                s.push_str(&format!("({c})*({basis})"));
            }
        }
        s
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(BasisNames::Omega))
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(BasisNames::Omega))
    }
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= p * &f;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn w(dim: usize, idx: &[usize]) -> Form {
        Form::term(dim, idx, RatFunc::one()).unwrap()
    }

    fn c(s: &str) -> RatFunc {
        RatFunc::from_poly(parse_poly(s).unwrap())
    }

    #[test]
    fn alternation_and_antisymmetry() {
        let w1 = w(3, &[1]);
        let w2 = w(3, &[2]);
        assert!(w1.wedge(&w1).unwrap().is_zero());
        assert_eq!(w2.wedge(&w1).unwrap(), w(3, &[1, 2]).neg());
    }

    #[test]
    fn cube_of_block_diagonal_form() {
        let f = Form::term(6, &[1, 2], c("a1"))
            .unwrap()
            .add(&Form::term(6, &[3, 4], c("a2")).unwrap())
            .unwrap()
            .add(&Form::term(6, &[5, 6], c("a3")).unwrap())
            .unwrap();
        let cube = f.wedge(&f).unwrap().wedge(&f).unwrap();
        assert_eq!(cube, Form::term(6, &[1, 2, 3, 4, 5, 6], c("6*a1*a2*a3")).unwrap());
        assert_eq!(f.top_power(3).unwrap(), cube);
    }

    #[test]
    fn top_power_sign_from_single_permutation() {
        // 1 4 2 3 5 6 has two inversions, so the sign is +1
        let f = Form::term(6, &[1, 4], c("a5"))
            .unwrap()
            .add(&Form::term(6, &[2, 3], c("a6")).unwrap())
            .unwrap()
            .add(&Form::term(6, &[5, 6], c("a7")).unwrap())
            .unwrap();
        assert_eq!(f.top_power(3).unwrap().volume_coefficient(), c("6*a5*a6*a7"));
    }

    #[test]
    fn top_power_identity_and_degenerate() {
        assert_eq!(w(2, &[1, 2]).top_power(1).unwrap(), w(2, &[1, 2]));
        let f = Form::term(4, &[1, 2], c("a"))
            .unwrap()
            .add(&Form::term(4, &[1, 3], c("b")).unwrap())
            .unwrap();
        assert!(f.top_power(2).unwrap().is_zero());
        assert!(w(3, &[1]).top_power(1).is_err());
    }

    #[test]
    fn rank_examples() {
        let none = BTreeMap::new();
        assert_eq!(w(6, &[1, 2]).rank_of_two_form(&none).unwrap(), 2);
        let full = w(6, &[1, 2]).add(&w(6, &[3, 4])).unwrap().add(&w(6, &[5, 6])).unwrap();
        assert_eq!(full.rank_of_two_form(&none).unwrap(), 6);
        let sym = Form::term(2, &[1, 2], c("a")).unwrap();
        assert!(matches!(sym.rank_of_two_form(&none), Err(ExteriorError::Binding(_))));
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(w(3, &[1]).wedge(&w(4, &[1])), Err(ExteriorError::DimensionMismatch(3, 4)));
        assert!(Form::basis(6, 7).is_err());
    }

    #[test]
    fn basis_names_round_trip() {
        let n = BasisNames::Nilradical(4);
        assert_eq!(n.label(3), "e3");
        assert_eq!(n.label(5), "w1");
        assert_eq!(n.index_of("w2"), Some(6));
        assert_eq!(n.index_of("e5"), None);
        assert_eq!(BasisNames::Omega.index_of("w5"), Some(5));
    }
}
