//! Regeneration of the three classification tables and the row-level diff
//! against transcribed expectations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::range::range_holds;
use crate::algebra::{parse_form, AlgebraDef, Bindings, Catalog, FormScope};
use crate::exterior::{BasisNames, Form};
use crate::ring::{parse_ratfunc_with, rat, Poly, Rational, RingError, Var};
use crate::symplectic::{
    decide_exact_symplectic, decide_symplectic, verify_table_entry, Mode, SymplecticReport, TableVerdict, Verdict,
};

use super::CliError;

const EXPECTED_T1: &str = include_str!("../../data/expected/t1.json");
const EXPECTED_T2: &str = include_str!("../../data/expected/t2.json");
const EXPECTED_T3: &str = include_str!("../../data/expected/t3.json");

/// Canonical samples per family for the instantiated cross-check.
const SAMPLES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    T1,
    T2,
    T3,
}

impl TableId {
    pub fn title(self) -> &'static str {
        match self {
            TableId::T1 => "direct sums of two three-dimensional solvable algebras",
            TableId::T2 => "direct sums g5 + L1",
            TableId::T3 => "indecomposable algebras with four-dimensional nilradical",
        }
    }

    /// The bundled transcription of the printed table.
    pub fn bundled_expected(self) -> ExpectedTable {
        let src = match self {
            TableId::T1 => EXPECTED_T1,
            TableId::T2 => EXPECTED_T2,
            TableId::T3 => EXPECTED_T3,
        };
        serde_json::from_str(src).expect("bundled expected table is well formed")
    }

    /// Family expressions analysed for this table, in catalog order.
    pub fn families(self, catalog: &Catalog) -> Vec<String> {
        match self {
            TableId::T1 => {
                let a3: Vec<&str> = catalog.family("A3_").iter().map(|a| a.name.as_str()).collect();
                let mut out = Vec::new();
                for (i, x) in a3.iter().enumerate() {
                    for y in &a3[i..] {
                        // the Heisenberg algebra A3_1 is the only nilpotent one
                        if *x == "A3_1" && *y == "A3_1" {
                            continue;
                        }
                        out.push(format!("{x}+{y}"));
                    }
                }
                out
            }
            TableId::T2 => catalog.family("g5_").iter().map(|a| format!("{}+L1", a.name)).collect(),
            TableId::T3 => catalog.family("N6_").iter().map(|a| a.name.clone()).collect(),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for TableId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "T1" | "1" => Ok(TableId::T1),
            "T2" | "2" => Ok(TableId::T2),
            "T3" | "3" => Ok(TableId::T3),
            _ => Err(format!("unknown table '{s}' (T1, T2, T3)")),
        }
    }
}

/// A printed table transcribed row by row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectedTable {
    pub table: TableId,
    pub rows: Vec<ExpectedRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectedRow {
    /// Row label as printed.
    pub printed: String,
    /// Resolvable expression for the row's algebra, e.g. `g5_7(alpha,-alpha,-1)+L1`.
    pub algebra: String,
    /// Extra parameter polynomials the row requires to be nonzero.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assume: Vec<String>,
    /// Values for symbols that occur in the form but are fixed by the row.
    #[serde(default, rename = "let", skip_serializing_if = "BTreeMap::is_empty")]
    pub lets: BTreeMap<String, String>,
    /// Printed "exact" column; `None` when the cell is blank.
    pub exact: Option<bool>,
    pub form: String,
    /// Printed conditions, each meaning `poly != 0`; all of them are imposed.
    pub condition: Vec<String>,
    /// Which case of a combined printed row this is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    /// A reading of the form supported elsewhere in the source; checked
    /// alongside the printed one, never instead of it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<Correction>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Correction {
    pub form: String,
    pub evidence: String,
}

impl ExpectedRow {
    /// Printed label with the case, if any.
    pub fn label(&self) -> String {
        match &self.case {
            Some(c) => format!("{} [{c}]", self.printed),
            None => self.printed.clone(),
        }
    }

    /// The expression with argument lists removed, naming the family.
    pub fn family(&self) -> String {
        strip_args(&self.algebra)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Marker {
    Match,
    Mismatch,
    PaperOnly,
    EngineOnly,
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Marker::Match => "MATCH",
            Marker::Mismatch => "MISMATCH",
            Marker::PaperOnly => "PAPER-ONLY",
            Marker::EngineOnly => "ENGINE-ONLY",
        })
    }
}

/// One symplectic branch found by the engine.
#[derive(Clone, Debug, Serialize)]
pub struct EngineRow {
    pub branch: String,
    pub closed_space_dim: usize,
    pub exact_symplectic: bool,
    pub j0: usize,
    pub nondeg_poly: String,
    pub witness: Option<String>,
    pub witness_params: BTreeMap<String, String>,
    /// Indices of expected rows whose locus contains the witness point.
    pub covered_by: Vec<usize>,
    /// Whether the witness point satisfies the printed parameter ranges.
    pub witness_in_range: Option<bool>,
    /// A symplectic point of the branch inside the printed ranges, searched
    /// for when the witness lies outside them.
    pub in_range_point: Option<BTreeMap<String, String>>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyResult {
    pub family: String,
    /// Reason the family was not analysed.
    pub skipped: Option<String>,
    pub branches: usize,
    pub symplectic: Vec<EngineRow>,
    /// Canonical samples checked in instantiated mode, and how many were symplectic.
    pub samples: usize,
    pub symplectic_samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowCheck {
    pub row: usize,
    pub label: String,
    pub algebra: String,
    pub marker: Marker,
    pub verdict: Option<TableVerdict>,
    pub printed_exact: Option<bool>,
    pub engine_exact: Option<bool>,
    pub engine_symplectic: bool,
    pub reasons: Vec<String>,
    /// Verdict on the corrected form, when the row carries one.
    pub corrected: Option<TableVerdict>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub matched: usize,
    pub mismatched: usize,
    pub paper_only: usize,
    pub engine_only: usize,
    /// Engine branches with no symplectic point inside the printed ranges.
    pub out_of_range: usize,
    pub confirmed_absent: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: TableId,
    pub title: String,
    pub families: Vec<FamilyResult>,
    /// Present when diffing against an expected table.
    pub rows: Option<Vec<RowCheck>>,
    pub summary: Option<Summary>,
}

impl TableReport {
    /// No mismatches, paper-only or engine-only rows.
    pub fn clean(&self) -> bool {
        self.summary.as_ref().is_none_or(|s| s.mismatched + s.paper_only + s.engine_only == 0)
    }
}

pub(crate) fn strip_args(expr: &str) -> String {
    let mut out = String::new();
    let mut depth = 0;
    for c in expr.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if depth == 0 && !c.is_whitespace() => out.push(c),
            _ => {}
        }
    }
    out
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

/// The row's parameter values as polynomials in the family's parameters,
/// named the way the direct sum names them.
fn row_locus(catalog: &Catalog, row: &ExpectedRow) -> Result<(BTreeMap<Var, Poly>, Vec<Poly>), CliError> {
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut subs = BTreeMap::new();
    let mut all_renames = BTreeMap::new();
    for term in split_top(&row.algebra, '+') {
        let term = term.trim();
        let (name, args) = match term.find('(') {
            Some(i) => (&term[..i], Some(term[i + 1..].trim_end_matches(')'))),
            None => (term, None),
        };
        let base = catalog.get(name.trim())?;
        let mut rename: BTreeMap<Var, Poly> = BTreeMap::new();
        let mut target_of: BTreeMap<Var, Var> = BTreeMap::new();
        for p in &base.params {
            let b = p.var.name();
            let mut n = b.to_string();
            let mut k = 2;
            while taken.contains(&n) {
                n = format!("{b}_{k}");
                k += 1;
            }
            taken.insert(n.clone());
            rename.insert(p.var.clone(), Poly::var(Var::param(&n)));
            target_of.insert(p.var.clone(), Var::param(&n));
        }
        if let Some(args) = args {
            for (p, a) in base.params.iter().zip(split_top(args, ',')) {
                let a = a.trim();
                if a == "_" {
                    continue;
                }
                let resolve =
                    |n: &str| base.param(n).cloned().ok_or_else(|| RingError::UnknownIndeterminate(n.to_string()));
                let f = parse_ratfunc_with(a, &resolve).map_err(|e| CliError::Expected(format!("{}: {e}", row.label())))?;
                let poly = f.as_poly().cloned().ok_or_else(|| CliError::Expected(format!("{}: {a}", row.label())))?;
                subs.insert(target_of[&p.var].clone(), poly.substitute(&rename));
            }
        }
        all_renames.extend(rename);
    }
    let mut assume = Vec::new();
    for a in &row.assume {
        let p = crate::ring::parse_poly(a).map_err(|e| CliError::Expected(format!("{}: {e}", row.label())))?;
        assume.push(p.substitute(&all_renames));
    }
    Ok((subs, assume))
}

/// Whether a full binding of the family's parameters lies on the row.
pub(crate) fn row_contains(catalog: &Catalog, row: &ExpectedRow, point: &Bindings) -> Result<bool, CliError> {
    Ok(in_locus(&row_locus(catalog, row)?, point))
}

fn in_locus(locus: &(BTreeMap<Var, Poly>, Vec<Poly>), point: &Bindings) -> bool {
    let (subs, assume) = locus;
    subs.iter().all(|(v, p)| match (point.get(v), p.evaluate_full(point)) {
        (Some(x), Some(y)) => *x == y,
        _ => false,
    }) && assume.iter().all(|p| p.evaluate_full(point).is_some_and(|v| !num_traits::Zero::is_zero(&v)))
}

/// An algebra's scope extended by the row's fixed symbols.
struct RowScope<'a> {
    alg: &'a AlgebraDef,
    lets: &'a BTreeMap<String, String>,
}

impl FormScope for RowScope<'_> {
    fn dim(&self) -> usize {
        self.alg.dim
    }

    fn names(&self) -> BasisNames {
        self.alg.names()
    }

    fn resolve_scalar(&self, name: &str) -> Result<Var, String> {
        if self.lets.contains_key(name) {
            return Ok(Var::param(name));
        }
        FormScope::resolve_scalar(self.alg, name)
    }

    fn differential(&self, f: &Form) -> Result<Form, String> {
        FormScope::differential(self.alg, f)
    }
}

/// The row's algebra with the `assume` constraints added, its form and the
/// product of its conditions.
pub fn row_inputs(catalog: &Catalog, row: &ExpectedRow) -> Result<(AlgebraDef, Form, Poly), CliError> {
    let mut alg = catalog.resolve(&row.algebra)?;
    let ctx = |e: String| CliError::Expected(format!("{}: {e}", row.label()));
    for a in &row.assume {
        let resolve = |n: &str| alg.param(n).cloned().ok_or_else(|| RingError::UnknownIndeterminate(n.to_string()));
        let p = parse_ratfunc_with(a, &resolve).map_err(|e| ctx(e.to_string()))?;
        alg.constraints.push(p.num().clone());
    }
    let scope = RowScope { alg: &alg, lets: &row.lets };
    let mut lets = BTreeMap::new();
    for (k, v) in &row.lets {
        let p = crate::ring::parse_poly(v).map_err(|e| ctx(e.to_string()))?;
        lets.insert(Var::param(k), p);
    }
    let form = parse_form(&row.form, &scope).map_err(|e| ctx(e.to_string()))?;
    let form = form.substitute(&lets).map_err(|e| ctx(e.to_string()))?;
    let mut cond = Poly::constant(crate::ring::rat(1, 1));
    for c in &row.condition {
        let resolve = |n: &str| scope.resolve_scalar(n).map_err(|_| RingError::UnknownIndeterminate(n.to_string()));
        let p = parse_ratfunc_with(c, &resolve).map_err(|e| ctx(e.to_string()))?;
        cond = &cond * &p.num().substitute(&lets);
    }
    Ok((alg, form, cond))
}

fn show_bindings(b: &Bindings) -> BTreeMap<String, String> {
    b.iter().map(|(k, v)| (k.name().to_string(), v.to_string())).collect()
}

fn engine_row(alg: &AlgebraDef, ranges: &[SummandRange], r: &SymplecticReport) -> Result<EngineRow, CliError> {
    let witness_in_range = if r.witness.is_some() { in_printed_range(ranges, &r.witness_params) } else { None };
    let in_range_point = if witness_in_range == Some(false) { leaf_point_in_range(alg, ranges, r)? } else { None };
    Ok(EngineRow {
        branch: r.branch_text(),
        closed_space_dim: r.closed_space_dim,
        exact_symplectic: r.exact_symplectic,
        j0: r.j0,
        nondeg_poly: r.nondeg_display(alg),
        witness: r.witness.as_ref().map(|w| w.display_with(alg.names())),
        witness_params: show_bindings(&r.witness_params),
        covered_by: Vec::new(),
        witness_in_range,
        in_range_point: in_range_point.as_ref().map(show_bindings),
        notes: r.notes.clone(),
    })
}

/// The printed range of one summand and the names its parameters carry in
/// the family.
struct SummandRange {
    range: Option<String>,
    names: BTreeMap<Var, String>,
}

fn family_ranges(catalog: &Catalog, expr: &str) -> Result<Vec<SummandRange>, CliError> {
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    for term in split_top(&strip_args(expr), '+') {
        let base = catalog.get(term.trim())?;
        let mut names = BTreeMap::new();
        for p in &base.params {
            let b = p.var.name();
            let mut n = b.to_string();
            let mut k = 2;
            while taken.contains(&n) {
                n = format!("{b}_{k}");
                k += 1;
            }
            taken.insert(n.clone());
            names.insert(Var::param(&n), b.to_string());
        }
        out.push(SummandRange { range: base.params.first().and_then(|p| p.range.clone()), names });
    }
    Ok(out)
}

/// `None` when some range cannot be evaluated at the point.
fn in_printed_range(ranges: &[SummandRange], point: &Bindings) -> Option<bool> {
    let mut all = true;
    for s in ranges {
        let Some(r) = &s.range else { continue };
        let local: BTreeMap<String, Rational> =
            s.names.iter().filter_map(|(v, orig)| point.get(v).map(|x| (orig.clone(), x.clone()))).collect();
        all &= range_holds(r, &local)?;
    }
    Some(all)
}

/// Searches small rationals for the branch's free parameters.
fn leaf_point_in_range(alg: &AlgebraDef, ranges: &[SummandRange], r: &SymplecticReport) -> Result<Option<Bindings>, CliError> {
    let grid: Vec<Rational> =
        [(2, 1), (1, 2), (-1, 2), (-2, 1), (1, 1), (-1, 1), (0, 1), (3, 1), (1, 3), (-1, 3), (-3, 1)]
            .iter()
            .map(|&(n, d)| rat(n, d))
            .collect();
    let free: Vec<Var> = alg.param_vars().into_iter().filter(|v| !r.substitutions.contains_key(v)).collect();
    let total = grid.len().pow(free.len() as u32);
    for mut code in 0..total {
        let mut point = Bindings::new();
        for v in &free {
            point.insert(v.clone(), grid[code % grid.len()].clone());
            code /= grid.len();
        }
        for (v, p) in &r.substitutions {
            if let Some(x) = p.evaluate_full(&point) {
                point.insert(v.clone(), x);
            }
        }
        if !r.contains(&point) || alg.check_constraints(&point).is_err() || in_printed_range(ranges, &point) != Some(true) {
            continue;
        }
        let names = point.iter().map(|(k, v)| (k.name().to_string(), v.clone())).collect();
        let inst = alg.instantiate(&names)?;
        if decide_symplectic(&inst, Mode::Instantiated)?.iter().any(|x| x.symplectic) {
            return Ok(Some(point));
        }
    }
    Ok(None)
}

fn analyse_family(catalog: &Catalog, expr: &str) -> Result<FamilyResult, CliError> {
    let alg = catalog.resolve(expr)?;
    let mut out =
        FamilyResult { family: expr.to_string(), skipped: None, branches: 0, symplectic: Vec::new(), samples: 0, symplectic_samples: 0 };
    let jac = alg.jacobi_check(&[])?;
    if !jac.passed() {
        let ks: Vec<String> = jac.failures.iter().map(|(k, _)| alg.names().label(*k)).collect();
        out.skipped = Some(format!("Jacobi fails (d^2 {} != 0)", ks.join(", ")));
        return Ok(out);
    }
    let reports = decide_symplectic(&alg, Mode::Branching)?;
    out.branches = reports.len();
    let ranges = family_ranges(catalog, expr)?;
    out.symplectic = reports
        .iter()
        .filter(|r| r.symplectic)
        .map(|r| engine_row(&alg, &ranges, r))
        .collect::<Result<Vec<_>, _>>()?;
    for b in alg.canonical_samples(SAMPLES, |_| true) {
        let names = b.iter().map(|(k, v)| (k.name().to_string(), v.clone())).collect();
        let inst = alg.instantiate(&names)?;
        let r = decide_symplectic(&inst, Mode::Instantiated)?;
        out.samples += 1;
        if r.iter().any(|x| x.symplectic) {
            out.symplectic_samples += 1;
        }
    }
    Ok(out)
}

fn check_row(catalog: &Catalog, table: TableId, index: usize, row: &ExpectedRow) -> Result<RowCheck, CliError> {
    let (alg, form, cond) = row_inputs(catalog, row)?;
    let verdict = verify_table_entry(&alg, &form, &cond)?;
    let corrected = match &row.correction {
        Some(c) => {
            let fixed = ExpectedRow { form: c.form.clone(), correction: None, ..row.clone() };
            let (a, f, p) = row_inputs(catalog, &fixed)?;
            Some(verify_table_entry(&a, &f, &p)?)
        }
        None => None,
    };
    let reports = decide_symplectic(&alg, Mode::Branching)?;
    let engine_symplectic = reports.iter().any(|r| r.symplectic);
    let engine_exact = decide_exact_symplectic(&alg)?;
    let mut reasons = Vec::new();
    if !verdict.closed {
        reasons.push(format!("printed form is not closed: d = {}", verdict.residue));
    } else if verdict.verdict == Verdict::Fail {
        match &verdict.counterexample {
            Some(ce) => reasons.push(format!("degenerate where the condition holds, at {}", fmt_point(ce))),
            None => reasons.push("top power vanishes identically".into()),
        }
    }
    match row.exact {
        Some(e) if e != engine_exact => {
            reasons.push(format!("exact column says {}, engine says {}", yes_no(e), yes_no(engine_exact)))
        }
        None if table != TableId::T2 => {
            reasons.push(format!("exact cell blank; engine says {}", yes_no(engine_exact)))
        }
        _ => {}
    }
    let exact_ok = row.exact.is_none_or(|e| e == engine_exact);
    let marker = if !engine_symplectic {
        Marker::PaperOnly
    } else if verdict.passed() && exact_ok {
        Marker::Match
    } else {
        Marker::Mismatch
    };
    Ok(RowCheck {
        row: index,
        label: row.label(),
        algebra: row.algebra.clone(),
        marker,
        verdict: Some(verdict),
        printed_exact: row.exact,
        engine_exact: Some(engine_exact),
        engine_symplectic,
        reasons,
        corrected,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn fmt_point(p: &BTreeMap<String, String>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

/// Runs the analysis over the table's families and, when `expected` is
/// given, the row-level comparison.
pub fn run_table(catalog: &Catalog, table: TableId, expected: Option<&ExpectedTable>) -> Result<TableReport, CliError> {
    if let Some(e) = expected {
        if e.table != table {
            return Err(CliError::Expected(format!("expected file is for {}, not {table}", e.table)));
        }
    }
    let exprs = table.families(catalog);
    let mut families: Vec<FamilyResult> =
        exprs.par_iter().map(|f| analyse_family(catalog, f)).collect::<Result<Vec<_>, _>>()?;
    let Some(expected) = expected else {
        return Ok(TableReport { table, title: table.title().into(), families, rows: None, summary: None });
    };

    let mut rows: Vec<RowCheck> = expected
        .rows
        .par_iter()
        .enumerate()
        .map(|(i, r)| check_row(catalog, table, i, r))
        .collect::<Result<Vec<_>, _>>()?;
    let loci = expected.rows.iter().map(|r| row_locus(catalog, r)).collect::<Result<Vec<_>, _>>()?;
    for fam in &mut families {
        for leaf in &mut fam.symplectic {
            let point = parse_point(&leaf.witness_params);
            leaf.covered_by = expected
                .rows
                .iter()
                .enumerate()
                .filter(|(i, r)| r.family() == fam.family && in_locus(&loci[*i], &point))
                .map(|(i, _)| i)
                .collect();
        }
    }
    let known: BTreeSet<String> = families.iter().map(|f| f.family.clone()).collect();
    for (i, r) in expected.rows.iter().enumerate() {
        if !known.contains(&r.family()) {
            rows[i].reasons.push(format!("family {} is not part of this table's sweep", r.family()));
        }
    }
    let mut summary = Summary::default();
    for r in &rows {
        match r.marker {
            Marker::Match => summary.matched += 1,
            Marker::Mismatch => summary.mismatched += 1,
            Marker::PaperOnly => summary.paper_only += 1,
            Marker::EngineOnly => summary.engine_only += 1,
        }
    }
    for fam in &families {
        if fam.skipped.is_some() {
            summary.skipped += 1;
            continue;
        }
        for leaf in fam.symplectic.iter().filter(|l| l.covered_by.is_empty()) {
            if outside_range(leaf) {
                summary.out_of_range += 1;
            } else {
                summary.engine_only += 1;
            }
        }
        let listed = expected.rows.iter().any(|r| r.family() == fam.family);
        if !listed && fam.symplectic.is_empty() && fam.symplectic_samples == 0 {
            summary.confirmed_absent += 1;
        }
    }
    Ok(TableReport { table, title: table.title().into(), families, rows: Some(rows), summary: Some(summary) })
}

/// Witness outside the printed ranges and no symplectic point inside them.
fn outside_range(leaf: &EngineRow) -> bool {
    leaf.witness_in_range == Some(false) && leaf.in_range_point.is_none()
}

fn parse_point(m: &BTreeMap<String, String>) -> Bindings {
    m.iter()
        .filter_map(|(k, v)| crate::ring::parse_rational(v).ok().map(|x| (Var::param(k), x)))
        .collect()
}

/// Plain-text rendering; deterministic for a given report.
pub fn render(report: &TableReport, expected: Option<&ExpectedTable>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}: {}", report.table, report.title);
    let Some(rows) = &report.rows else {
        for fam in &report.families {
            render_family(&mut s, fam);
        }
        return s;
    };
    let expected = expected.expect("rows come from an expected table");
    for r in rows {
        let v = r.verdict.as_ref().map_or("-".to_string(), |v| format!("{:?}", v.verdict).to_lowercase());
        let ex = match (r.printed_exact, r.engine_exact) {
            (Some(p), Some(e)) => format!("exact {}/{}", yes_no(p), yes_no(e)),
            (None, Some(e)) if report.table != TableId::T2 => format!("exact -/{}", yes_no(e)),
            _ => String::new(),
        };
        let _ = writeln!(s, "{:<12}{}  [{}]  verify={v}  {ex}", r.marker.to_string(), r.label, r.algebra);
        for why in &r.reasons {
            let _ = writeln!(s, "            {why}");
        }
        if let (Some(v), Some(c)) = (&r.corrected, &expected.rows[r.row].correction) {
            let _ = writeln!(s, "            corrected form {}: verify={}", c.form, format!("{:?}", v.verdict).to_lowercase());
            let _ = writeln!(s, "            ({})", c.evidence);
        }
    }
    for fam in &report.families {
        if let Some(why) = &fam.skipped {
            let _ = writeln!(s, "{:<12}{}: {why}", "SKIPPED", fam.family);
            continue;
        }
        for leaf in fam.symplectic.iter().filter(|l| l.covered_by.is_empty()) {
            let marker = if outside_range(leaf) { "OUT-OF-RANGE".to_string() } else { Marker::EngineOnly.to_string() };
            let _ = writeln!(
                s,
                "{:<12}{} [{}]  exact {}  witness at {}: {}",
                marker,
                fam.family,
                leaf.branch,
                yes_no(leaf.exact_symplectic),
                fmt_point(&leaf.witness_params),
                leaf.witness.as_deref().unwrap_or("-"),
            );
            if outside_range(leaf) {
                let _ = writeln!(s, "            no symplectic point of this branch satisfies the printed parameter ranges");
            } else if let Some(p) = &leaf.in_range_point {
                let _ = writeln!(s, "            witness outside the printed ranges; symplectic in range at {}", fmt_point(p));
            }
        }
        let listed = expected.rows.iter().any(|r| r.family() == fam.family);
        if !listed && fam.symplectic.is_empty() {
            let _ = writeln!(
                s,
                "{:<12}{}: no symplectic branch among {}; {}/{} canonical samples symplectic",
                "ABSENT",
                fam.family,
                fam.branches,
                fam.symplectic_samples,
                fam.samples
            );
        }
    }
    if let Some(m) = &report.summary {
        let _ = writeln!(
            s,
            "summary: {} MATCH, {} MISMATCH, {} PAPER-ONLY, {} ENGINE-ONLY, {} OUT-OF-RANGE, {} absences confirmed, {} skipped",
            m.matched, m.mismatched, m.paper_only, m.engine_only, m.out_of_range, m.confirmed_absent, m.skipped
        );
    }
    s
}

fn render_family(s: &mut String, fam: &FamilyResult) {
    if let Some(why) = &fam.skipped {
        let _ = writeln!(s, "{}: skipped, {why}", fam.family);
        return;
    }
    let _ = writeln!(
        s,
        "{}: {} branches, {} symplectic; {}/{} canonical samples symplectic",
        fam.family,
        fam.branches,
        fam.symplectic.len(),
        fam.symplectic_samples,
        fam.samples
    );
    for leaf in &fam.symplectic {
        let branch = if leaf.branch.is_empty() { "all parameters".to_string() } else { leaf.branch.clone() };
        let _ = writeln!(
            s,
            "  [{branch}]  closed 2-forms: {}  exact: {}  j0: {}",
            leaf.closed_space_dim,
            yes_no(leaf.exact_symplectic),
            leaf.j0
        );
        if let Some(w) = &leaf.witness {
            let at = if leaf.witness_params.is_empty() { String::new() } else { format!(" at {}", fmt_point(&leaf.witness_params)) };
            let _ = writeln!(s, "    witness{at}: {w}");
        }
    }
}
