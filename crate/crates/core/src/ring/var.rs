use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// What an indeterminate stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    /// A structure parameter of an algebra (alpha, beta, p, s, eps, ...).
    Parameter,
    /// A free coefficient of a form (a1_2, a5, x3, ...).
    FormCoefficient,
}

/// Parameter spellings in their canonical declaration order.
const PARAM_ORDER: &[&str] = &["alpha", "beta", "gamma", "delta", "p", "q", "s", "eps"];

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
struct SortKey {
    kind: VarKind,
    group: u32,
    prefix: String,
    nums: Vec<u32>,
}

struct Inner {
    name: String,
    kind: VarKind,
    key: SortKey,
}

/// A named indeterminate.
///
/// Equality is by `(kind, name)`. The total order is the declaration order
/// used by the monomial ordering: parameters before form coefficients,
/// parameters in the order alpha, beta, gamma, delta, p, q, s, eps and then
/// alphabetically, coefficients by prefix and then by their numeric indices.
#[derive(Clone)]
pub struct Var(Arc<Inner>);

impl Var {
    pub fn new(name: &str, kind: VarKind) -> Self {
        let (prefix, nums) = split_name(name, kind);
        let group = match kind {
            VarKind::Parameter => PARAM_ORDER
                .iter()
                .position(|p| *p == prefix)
                .map(|i| i as u32)
                .unwrap_or(PARAM_ORDER.len() as u32),
            VarKind::FormCoefficient => 0,
        };
        Var(Arc::new(Inner {
            name: name.to_string(),
            kind,
            key: SortKey { kind, group, prefix, nums },
        }))
    }

    pub fn param(name: &str) -> Self {
        Self::new(name, VarKind::Parameter)
    }

    pub fn coef(name: &str) -> Self {
        Self::new(name, VarKind::FormCoefficient)
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> VarKind {
        self.0.kind
    }

    pub fn is_param(&self) -> bool {
        self.0.kind == VarKind::Parameter
    }

    /// Whether `name` is spelled like a form coefficient (`a3`, `a1_5`, `x2`).
    pub fn looks_like_coefficient(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some('a') | Some('x') => {}
            _ => return false,
        }
        let rest: String = chars.collect();
        !rest.is_empty()
            && rest.chars().next().is_some_and(|c| c.is_ascii_digit())
            && rest.chars().all(|c| c.is_ascii_digit() || c == '_')
    }
}

fn split_name(name: &str, kind: VarKind) -> (String, Vec<u32>) {
    match kind {
        VarKind::Parameter => {
            // alpha_2 -> ("alpha", [2])
            if let Some((base, tail)) = name.rsplit_once('_') {
                if let Ok(n) = tail.parse::<u32>() {
                    return (base.to_string(), vec![n]);
                }
            }
            (name.to_string(), Vec::new())
        }
        VarKind::FormCoefficient => {
            let prefix: String = name.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
            let nums = name[prefix.len()..]
                .split('_')
                .filter_map(|s| s.parse::<u32>().ok())
                .collect();
            (prefix, nums)
        }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.kind == other.0.kind && self.0.name == other.0.name)
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state);
        self.0.name.hash(state);
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .key
            .cmp(&other.0.key)
            .then_with(|| self.0.name.cmp(&other.0.name))
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declaration_order() {
        let mut v = [
            Var::coef("a2"),
            Var::param("delta"),
            Var::coef("a1_5"),
            Var::param("alpha_2"),
            Var::param("alpha"),
            Var::param("eps"),
            Var::coef("a10"),
            Var::param("gamma"),
        ];
        v.sort();
        let names: Vec<_> = v.iter().map(|v| v.name().to_string()).collect();
        assert_eq!(
            names,
            ["alpha", "alpha_2", "gamma", "delta", "eps", "a1_5", "a2", "a10"]
        );
    }

    #[test]
    fn coefficient_spelling() {
        assert!(Var::looks_like_coefficient("a5"));
        assert!(Var::looks_like_coefficient("a1_2"));
        assert!(!Var::looks_like_coefficient("a"));
        assert!(!Var::looks_like_coefficient("alpha"));
    }
}
