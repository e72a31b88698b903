//! The plain-text catalog format.
//!
//! ```text
//! # comment
//! algebra g5_7 dim 5
//!   params alpha beta gamma
//!   constraint alpha*gamma*beta != 0
//!   range "-1<=alpha,beta,gamma<=1"
//!   meta nilradical=4 source="Table 5"
//!   d w1 = w1^w5
//!   d w2 = alpha*(w2^w5)
//! end
//! ```
//!
//! `meta eta=4` switches the basis spelling to `e1..e4, w1, w2`. Generators
//! without a `d` line are closed.
//!
//! Errata files patch the `k`-th `d` line of a block (1-based, counted in
//! file order) and must give a reason:
//!
//! ```text
//! patch g5_16 line 2
//!   reason "second line restates d w1; its index is 2"
//!   d w2 = w2^w5
//! end
//! ```
//!
//! An empty body deletes the line. Parsing is split so that the raw form,
//! including duplicate or malformed `d` lines, survives until errata are
//! applied; [`build`] then rejects anything still inconsistent.

use std::collections::BTreeMap;
use std::fmt;

use crate::exterior::{BasisNames, Form};
use crate::ring::{parse_poly_with, Poly, RingError, Var};

use super::expr::{parse_form, FormScope};
use super::{AlgebraDef, AlgebraMeta, ParamSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DslError {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.col, self.message)
    }
}

impl std::error::Error for DslError {}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDLine {
    pub line: usize,
    /// 1-based column of the right-hand side.
    pub col: usize,
    pub label: String,
    pub rhs: String,
    /// Set when the line came from an errata patch.
    pub patched: Option<String>,
}

impl RawDLine {
    pub fn text(&self) -> String {
        format!("d {} = {}", self.label, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawAlgebra {
    pub file: String,
    pub name: String,
    pub dim: usize,
    pub line: usize,
    pub params: Vec<String>,
    pub constraints: Vec<(usize, String)>,
    pub range: Option<String>,
    pub meta: BTreeMap<String, String>,
    pub dlines: Vec<RawDLine>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub file: String,
    pub line: usize,
    pub algebra: String,
    /// 1-based index among the block's `d` lines.
    pub target: usize,
    pub reason: String,
    pub replacement: Vec<RawDLine>,
}

/// Record of one applied patch.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AppliedPatch {
    pub algebra: String,
    pub target: usize,
    pub before: String,
    pub after: Vec<String>,
    pub reason: String,
}

fn err(file: &str, line: usize, col: usize, message: impl Into<String>) -> DslError {
    DslError { file: file.to_string(), line, col, message: message.into() }
}

/// Whitespace-separated words; double quotes group.
fn words(s: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut quoted = false;
    for (i, c) in s.char_indices() {
        if c == '"' {
            if cur.is_empty() && !quoted {
                start = i;
            }
            quoted = !quoted;
            continue;
        }
        if c.is_whitespace() && !quoted {
            if !cur.is_empty() {
                out.push((start, std::mem::take(&mut cur)));
            }
            continue;
        }
        if cur.is_empty() && !quoted {
            start = i;
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push((start, cur));
    }
    out
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_dline(file: &str, lineno: usize, line: &str) -> Result<RawDLine, DslError> {
    let indent = line.len() - line.trim_start().len();
    let body = line.trim_start();
    let rest = body.strip_prefix('d').filter(|r| r.starts_with(char::is_whitespace));
    let Some(rest) = rest else {
        return Err(err(file, lineno, indent + 1, "expected 'd <label> = <form>'"));
    };
    let Some(eq) = rest.find('=') else {
        return Err(err(file, lineno, indent + 2, "missing '='"));
    };
    let label = rest[..eq].trim().to_string();
    if label.is_empty() {
        return Err(err(file, lineno, indent + 2, "missing generator label"));
    }
    let rhs_raw = &rest[eq + 1..];
    let lead = rhs_raw.len() - rhs_raw.trim_start().len();
    let col = indent + 1 + (body.len() - rest.len()) + eq + 1 + lead;
    Ok(RawDLine { line: lineno, col, label, rhs: rhs_raw.trim().to_string(), patched: None })
}

/// Parses blocks without interpreting any expression.
pub fn parse_raw(file: &str, src: &str) -> Result<Vec<RawAlgebra>, DslError> {
    let mut out = Vec::new();
    let mut cur: Option<RawAlgebra> = None;
    for (i, raw_line) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw_line);
        let ws = words(line);
        let Some((c0, head)) = ws.first() else { continue };
        let col = c0 + 1;
        match (head.as_str(), cur.as_mut()) {
            ("algebra", None) => {
                if ws.len() != 4 || ws[2].1 != "dim" {
                    return Err(err(file, lineno, col, "expected 'algebra <name> dim <n>'"));
                }
                let dim: usize = ws[3]
                    .1
                    .parse()
                    .ok()
                    .filter(|&n| (1..=32).contains(&n))
                    .ok_or_else(|| err(file, lineno, ws[3].0 + 1, "dimension must be an integer in 1..=32"))?;
                cur = Some(RawAlgebra {
                    file: file.to_string(),
                    name: ws[1].1.clone(),
                    dim,
                    line: lineno,
                    params: Vec::new(),
                    constraints: Vec::new(),
                    range: None,
                    meta: BTreeMap::new(),
                    dlines: Vec::new(),
                });
            }
            ("algebra", Some(_)) => return Err(err(file, lineno, col, "nested 'algebra' (missing 'end')")),
            ("end", Some(_)) => out.push(cur.take().expect("open block")),
            (_, None) => return Err(err(file, lineno, col, format!("'{head}' outside an algebra block"))),
            ("params", Some(a)) => a.params.extend(ws[1..].iter().map(|(_, w)| w.clone())),
            ("constraint", Some(a)) => {
                let body = line[c0 + "constraint".len()..].trim();
                let Some(poly) = body.strip_suffix("!= 0").or_else(|| body.strip_suffix("!=0")) else {
                    return Err(err(file, lineno, col, "expected 'constraint <poly> != 0'"));
                };
                a.constraints.push((lineno, poly.trim().to_string()));
            }
            ("range", Some(a)) => a.range = Some(ws[1..].iter().map(|(_, w)| w.as_str()).collect::<Vec<_>>().join(" ")),
            ("meta", Some(a)) => {
                for (c, w) in &ws[1..] {
                    let Some((k, v)) = w.split_once('=') else {
                        return Err(err(file, lineno, c + 1, "expected key=value"));
                    };
                    a.meta.insert(k.to_string(), v.to_string());
                }
            }
            ("d", Some(a)) => a.dlines.push(parse_dline(file, lineno, line)?),
            (other, Some(_)) => return Err(err(file, lineno, col, format!("unknown directive '{other}'"))),
        }
    }
    if let Some(a) = cur {
        return Err(err(file, a.line, 1, format!("block '{}' not closed with 'end'", a.name)));
    }
    Ok(out)
}

pub fn parse_errata(file: &str, src: &str) -> Result<Vec<Patch>, DslError> {
    let mut out = Vec::new();
    let mut cur: Option<Patch> = None;
    for (i, raw_line) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw_line);
        let ws = words(line);
        let Some((c0, head)) = ws.first() else { continue };
        let col = c0 + 1;
        match (head.as_str(), cur.as_mut()) {
            ("patch", None) => {
                let target = (ws.len() == 4 && ws[2].1 == "line").then(|| ws[3].1.parse::<usize>().ok()).flatten();
                let Some(target) = target.filter(|&t| t > 0) else {
                    return Err(err(file, lineno, col, "expected 'patch <algebra> line <k>'"));
                };
                cur = Some(Patch {
                    file: file.to_string(),
                    line: lineno,
                    algebra: ws[1].1.clone(),
                    target,
                    reason: String::new(),
                    replacement: Vec::new(),
                });
            }
            ("reason", Some(p)) => p.reason = ws[1..].iter().map(|(_, w)| w.as_str()).collect::<Vec<_>>().join(" "),
            ("d", Some(p)) => p.replacement.push(parse_dline(file, lineno, line)?),
            ("end", Some(p)) => {
                if p.reason.trim().is_empty() {
                    return Err(err(file, p.line, 1, "patch without a reason"));
                }
                out.push(cur.take().expect("open patch"));
            }
            (other, _) => return Err(err(file, lineno, col, format!("unexpected '{other}' in errata"))),
        }
    }
    if let Some(p) = cur {
        return Err(err(file, p.line, 1, "patch not closed with 'end'"));
    }
    Ok(out)
}

/// Applies every patch; a patch naming an unknown algebra or line is an
/// error. Patches on one algebra are applied from the highest target down so
/// indices refer to the unpatched block.
pub fn apply_errata(raws: &mut [RawAlgebra], patches: &[Patch]) -> Result<Vec<AppliedPatch>, DslError> {
    let mut sorted: Vec<&Patch> = patches.iter().collect();
    sorted.sort_by(|a, b| (a.algebra.as_str(), std::cmp::Reverse(a.target)).cmp(&(b.algebra.as_str(), std::cmp::Reverse(b.target))));
    let mut applied = Vec::new();
    for p in sorted {
        let Some(a) = raws.iter_mut().find(|a| a.name == p.algebra) else {
            return Err(err(&p.file, p.line, 1, format!("patch for unknown algebra '{}'", p.algebra)));
        };
        if p.target > a.dlines.len() {
            return Err(err(&p.file, p.line, 1, format!("{} has only {} d lines", a.name, a.dlines.len())));
        }
        let before = a.dlines[p.target - 1].text();
        let repl: Vec<RawDLine> =
            p.replacement.iter().map(|d| RawDLine { patched: Some(p.reason.clone()), ..d.clone() }).collect();
        let after = repl.iter().map(RawDLine::text).collect();
        a.dlines.splice(p.target - 1..p.target, repl);
        applied.push(AppliedPatch { algebra: a.name.clone(), target: p.target, before, after, reason: p.reason.clone() });
    }
    applied.sort_by(|x, y| (x.algebra.as_str(), x.target).cmp(&(y.algebra.as_str(), y.target)));
    Ok(applied)
}

struct BuildScope<'a> {
    dim: usize,
    names: BasisNames,
    params: &'a [ParamSpec],
}

impl FormScope for BuildScope<'_> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn names(&self) -> BasisNames {
        self.names
    }
    fn resolve_scalar(&self, name: &str) -> Result<Var, String> {
        self.params
            .iter()
            .find(|p| p.var.name() == name)
            .map(|p| p.var.clone())
            .ok_or_else(|| format!("undeclared parameter '{name}'"))
    }
    fn differential(&self, _f: &Form) -> Result<Form, String> {
        Err("d(...) is not allowed in a structure equation".into())
    }
}

/// Interprets a raw block.
pub fn build(raw: &RawAlgebra) -> Result<AlgebraDef, DslError> {
    let f = raw.file.as_str();
    let mut meta = AlgebraMeta { source: raw.meta.get("source").cloned(), ..Default::default() };
    for (k, v) in &raw.meta {
        let num = || v.parse::<usize>().map_err(|_| err(f, raw.line, 1, format!("meta {k} expects an integer")));
        match k.as_str() {
            "nilradical" => meta.nilradical_dim = Some(num()?),
            "eta" => {
                let k = num()?;
                if k > raw.dim {
                    return Err(err(f, raw.line, 1, "eta exceeds the dimension"));
                }
                meta.names = BasisNames::Nilradical(k);
            }
            "source" => {}
            other => return Err(err(f, raw.line, 1, format!("unknown meta key '{other}'"))),
        }
    }
    let mut params = Vec::new();
    for p in &raw.params {
        if Var::looks_like_coefficient(p) || params.iter().any(|q: &ParamSpec| q.var.name() == p) {
            return Err(err(f, raw.line, 1, format!("bad or repeated parameter name '{p}'")));
        }
        params.push(ParamSpec { var: Var::param(p), range: raw.range.clone() });
    }
    let scope = BuildScope { dim: raw.dim, names: meta.names, params: &params };
    let mut constraints: Vec<Poly> = Vec::new();
    for (line, text) in &raw.constraints {
        let p = parse_poly_with(text, &|n: &str| {
            scope.resolve_scalar(n).map_err(|m| RingError::Parse { offset: 0, message: m })
        })
        .map_err(|e| err(f, *line, 1, e.to_string()))?;
        if p.is_zero() || p.is_constant() {
            return Err(err(f, *line, 1, format!("constraint '{text}' is constant")));
        }
        constraints.push(p);
    }
    let mut mc: Vec<Option<(usize, Form)>> = vec![None; raw.dim];
    for dl in &raw.dlines {
        let Some(k) = meta.names.index_of(&dl.label).filter(|&k| k <= raw.dim) else {
            return Err(err(f, dl.line, dl.col, format!("unknown generator '{}'", dl.label)));
        };
        if let Some((prev, _)) = &mc[k - 1] {
            return Err(err(f, dl.line, 1, format!("d {} already defined on line {prev}", dl.label)));
        }
        let form = parse_form(&dl.rhs, &scope).map_err(|e| err(f, dl.line, dl.col + e.offset, e.message))?;
        if !form.is_zero() && !form.is_homogeneous(2) {
            return Err(err(f, dl.line, dl.col, format!("d {} is not a 2-form", dl.label)));
        }
        mc[k - 1] = Some((dl.line, form));
    }
    let mc = mc.into_iter().map(|m| m.map_or_else(|| Form::zero(raw.dim), |(_, x)| x)).collect();
    AlgebraDef::new(&raw.name, params, constraints, mc, meta).map_err(|e| err(f, raw.line, 1, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = r#"
# sample
algebra A3_4 dim 3
  params alpha
  constraint alpha != 0
  range "-1<=alpha<=1"
  d w1 = w1^w3
  d w2 = alpha*(w2^w3)
end
algebra T dim 3
  d w1 = w2^w3
  d w1 = w1^w3
end
"#;

    #[test]
    fn raw_keeps_duplicates_and_build_rejects_them() {
        let raws = parse_raw("t", SRC).unwrap();
        assert_eq!(raws.len(), 2);
        assert_eq!(raws[0].range.as_deref(), Some("-1<=alpha<=1"));
        let a = build(&raws[0]).unwrap();
        assert_eq!(a.mc[1].to_string(), "alpha*(w2^w3)");
        let e = build(&raws[1]).unwrap_err();
        assert_eq!(e.line, 12);
        assert!(e.message.contains("already defined on line 11"), "{e}");
    }

    #[test]
    fn errata_replace_and_record() {
        let mut raws = parse_raw("t", SRC).unwrap();
        let patches = parse_errata("e", "patch T line 2\n reason \"index typo\"\n d w2 = w1^w3\nend\n").unwrap();
        let applied = apply_errata(&mut raws, &patches).unwrap();
        assert_eq!(applied[0].before, "d w1 = w1^w3");
        assert_eq!(applied[0].after, vec!["d w2 = w1^w3".to_string()]);
        assert!(build(&raws[1]).is_ok());
        assert!(parse_errata("e", "patch T line 1\n d w2 = w1^w3\nend\n").is_err());
    }

    #[test]
    fn expression_error_position() {
        let src = "algebra X dim 2\n  d w2 = w1^w2 + zeta*(w1^w2)\nend\n";
        let e = build(&parse_raw("x", src).unwrap()[0]).unwrap_err();
        assert_eq!((e.line, e.col), (2, 18));
        assert!(e.message.contains("zeta"));
    }

    #[test]
    fn syntax_errors_have_lines() {
        assert_eq!(parse_raw("x", "algebra X dim\nend\n").unwrap_err().line, 1);
        assert_eq!(parse_raw("x", "algebra X dim 2\n  dw1 = 0\nend\n").unwrap_err().line, 2);
        assert_eq!(parse_raw("x", "algebra X dim 2\n").unwrap_err().line, 1);
    }
}
