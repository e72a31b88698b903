//! The bundled catalog and algebra expressions such as `A3_4(-1)+A3_5(0)`,
//! `g5_36+L1` or `N6_1(alpha,beta,-alpha,-beta)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ring::{parse_ratfunc_with, Poly, RingError, Var};

use super::dsl::{self, AppliedPatch, DslError};
use super::{AlgebraDef, AlgebraError};

pub const CATALOG_SRC: &str = include_str!("../../data/catalog.mcalg");
pub const EXTRAS_SRC: &str = include_str!("../../data/extras.mcalg");
pub const ERRATA_SRC: &str = include_str!("../../data/errata.mcalg");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("duplicate algebra '{0}'")]
    Duplicate(String),
    #[error("unknown algebra '{0}'")]
    Unknown(String),
    #[error("bad algebra expression '{0}': {1}")]
    Expression(String, String),
}

/// How to treat the errata overlay when loading.
#[derive(Clone, Debug, Default)]
pub enum Errata {
    #[default]
    Bundled,
    None,
    Custom { file: String, text: String },
}

#[derive(Clone, Debug)]
pub struct Catalog {
    order: Vec<String>,
    algebras: BTreeMap<String, AlgebraDef>,
    applied: Vec<AppliedPatch>,
}

impl Catalog {
    /// Catalog plus building blocks, with the bundled errata applied.
    pub fn bundled() -> Catalog {
        Catalog::load(Errata::Bundled).expect("bundled catalog is well formed")
    }

    pub fn load(errata: Errata) -> Result<Catalog, CatalogError> {
        Catalog::from_sources(&[("catalog.mcalg", CATALOG_SRC), ("extras.mcalg", EXTRAS_SRC)], errata)
    }

    pub fn from_sources(sources: &[(&str, &str)], errata: Errata) -> Result<Catalog, CatalogError> {
        let mut raws = Vec::new();
        for (file, text) in sources {
            raws.extend(dsl::parse_raw(file, text)?);
        }
        let patches = match &errata {
            Errata::Bundled => dsl::parse_errata("errata.mcalg", ERRATA_SRC)?,
            Errata::None => Vec::new(),
            Errata::Custom { file, text } => dsl::parse_errata(file, text)?,
        };
        let applied = dsl::apply_errata(&mut raws, &patches)?;
        let mut order = Vec::new();
        let mut algebras = BTreeMap::new();
        for r in &raws {
            let a = dsl::build(r)?;
            if algebras.insert(a.name.clone(), a).is_some() {
                return Err(CatalogError::Duplicate(r.name.clone()));
            }
            order.push(r.name.clone());
        }
        Ok(Catalog { order, algebras, applied })
    }

    /// Algebras in file order.
    pub fn iter(&self) -> impl Iterator<Item = &AlgebraDef> {
        self.order.iter().map(|n| &self.algebras[n])
    }

    pub fn get(&self, name: &str) -> Result<&AlgebraDef, CatalogError> {
        self.algebras.get(name).ok_or_else(|| CatalogError::Unknown(name.to_string()))
    }

    pub fn applied_errata(&self) -> &[AppliedPatch] {
        &self.applied
    }

    /// Names starting with `prefix` (`"g5_"`, `"N6_"`), in file order.
    pub fn family(&self, prefix: &str) -> Vec<&AlgebraDef> {
        self.iter().filter(|a| a.name.starts_with(prefix)).collect()
    }

    /// Resolves `term (+ term)*` where a term is `[k]Name[(v1,...,vm)]`.
    /// Values are rationals or polynomials in the algebra's own parameters;
    /// `_` leaves a parameter free. `kName` is `k` copies of `Name`.
    pub fn resolve(&self, expr: &str) -> Result<AlgebraDef, CatalogError> {
        let bad = |m: &str| CatalogError::Expression(expr.to_string(), m.to_string());
        let mut acc: Option<AlgebraDef> = None;
        for term in split_top(expr, '+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad("empty summand"));
            }
            let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
            let copies: usize = if digits > 0 { term[..digits].parse().map_err(|_| bad("bad count"))? } else { 1 };
            let rest = &term[digits..];
            let (name, args) = match rest.find('(') {
                Some(i) => {
                    let inner = rest[i + 1..].strip_suffix(')').ok_or_else(|| bad("missing ')'"))?;
                    (&rest[..i], Some(inner))
                }
                None => (rest, None),
            };
            let base = self.get(name.trim())?;
            let one = match args {
                None => base.clone(),
                Some(a) => apply_args(base, &split_top(a, ','))?,
            };
            for _ in 0..copies.max(1) {
                acc = Some(match acc {
                    None => one.clone(),
                    Some(prev) => prev.direct_sum(&one)?,
                });
            }
        }
        acc.ok_or_else(|| bad("empty expression"))
    }
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn apply_args(base: &AlgebraDef, args: &[&str]) -> Result<AlgebraDef, CatalogError> {
    if args.len() != base.params.len() {
        return Err(AlgebraError::Arity { name: base.name.clone(), expected: base.params.len(), got: args.len() }.into());
    }
    let mut subs: BTreeMap<Var, Poly> = BTreeMap::new();
    for (p, a) in base.params.iter().zip(args) {
        let a = a.trim();
        if a == "_" {
            continue;
        }
        let resolve = |n: &str| {
            base.param(n).cloned().ok_or_else(|| RingError::UnknownIndeterminate(n.to_string()))
        };
        let f = parse_ratfunc_with(a, &resolve).map_err(|e| CatalogError::Expression(a.to_string(), e.to_string()))?;
        let poly = f
            .as_poly()
            .cloned()
            .ok_or_else(|| CatalogError::Expression(a.to_string(), "parameter values must be polynomial".into()))?;
        subs.insert(p.var.clone(), poly);
    }
    let subs: BTreeMap<Var, Poly> = subs.into_iter().filter(|(v, p)| p != &Poly::var(v.clone())).collect();
    let mut out = base.specialize(&subs)?;
    out.meta.bindings = base
        .params
        .iter()
        .map(|p| {
            let v = subs.get(&p.var).map_or_else(|| p.var.name().to_string(), |x| x.to_string());
            (p.var.name().to_string(), v)
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_counts() {
        let c = Catalog::bundled();
        assert_eq!(c.family("A3_").len(), 5);
        assert_eq!(c.family("g5_").len(), 33);
        assert_eq!(c.family("N6_").len(), 40);
    }

    #[test]
    fn resolves_sums_and_arguments() {
        let c = Catalog::bundled();
        let a = c.resolve("A3_4(-1)+A3_5(0)").unwrap();
        assert_eq!(a.dim, 6);
        assert!(a.params.is_empty());
        assert_eq!(a.name, "A3_4(-1)+A3_5(0)");
        let b = c.resolve("g5_36+L1").unwrap();
        assert_eq!(b.dim, 6);
        let n = c.resolve("N6_1(alpha,beta,-alpha,-beta)").unwrap();
        assert_eq!(n.params.len(), 2);
        assert_eq!(n.mc[1].display_with(n.names()), "alpha*(e2^w1) + beta*(e2^w2)");
        let l = c.resolve("2L1").unwrap();
        assert_eq!(l.dim, 2);
        assert!(c.resolve("A3_4(0)").is_err());
        assert!(c.resolve("A3_4(1,2)").is_err());
    }

    #[test]
    fn without_errata_the_misprints_surface() {
        let e = Catalog::load(Errata::None).unwrap_err();
        assert!(e.to_string().contains("catalog.mcalg"), "{e}");
    }
}
