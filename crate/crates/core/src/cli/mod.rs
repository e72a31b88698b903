//! Command-line front end: catalog validation, per-algebra analysis and
//! table regeneration. Exit codes: 0 ran, 1 verification failure, 2 usage
//! or parse error.

pub mod tables;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::algebra::{AlgebraError, Catalog, CatalogError, Errata};
use crate::ring::{parse_rational, Poly};
use crate::symplectic::{decide_symplectic, verify_table_entry, Mode, SymplecticError, SymplecticReport};

pub use tables::{render, run_table, ExpectedRow, ExpectedTable, Marker, TableId, TableReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error("expected table: {0}")]
    Expected(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Expected(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "symplie", version, about = "Symplectic and contact structures on real Lie algebras")]
pub struct Cli {
    /// Errata overlay: a file, or `none`. Defaults to the bundled overlay for
    /// the bundled catalog and to none for catalog files given on the command line.
    #[arg(long, global = true)]
    pub errata: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check d^2 = 0 on every algebra of a catalog.
    Validate {
        /// Catalog files; the bundled catalog when empty.
        files: Vec<String>,
    },
    /// Closed 2-forms, symplectic and exact verdicts for one algebra.
    Analyze {
        /// Algebra expression, e.g. `N6_1`, `A3_4(-1)+A3_5(0)` or `g5_36+L1`.
        expr: String,
        #[arg(long, default_value = "branching")]
        mode: Mode,
        /// Parameter values `name=rational`.
        #[arg(long = "params", num_args = 1.., value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Regenerate a table and optionally diff it against the printed one.
    Tables {
        table: TableId,
        /// Expected table JSON; the bundled transcription when given without a path.
        #[arg(long, num_args = 0..=1, default_missing_value = "bundled")]
        diff: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

/// Captured output of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, ..Default::default() }
            } else {
                Outcome { stderr: text, code, ..Default::default() }
            };
        }
    };
    match execute(&cli) {
        Ok(o) => o,
        Err(e) => Outcome { stderr: format!("error: {e}\n"), code: 2, ..Default::default() },
    }
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_string(), message: e.to_string() })
}

fn errata_for(flag: &Option<String>, custom_catalog: bool) -> Result<Errata, CliError> {
    Ok(match flag.as_deref() {
        None if custom_catalog => Errata::None,
        None => Errata::Bundled,
        Some("none") => Errata::None,
        Some(path) => Errata::Custom { file: path.to_string(), text: read(path)? },
    })
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate { files } => validate(files, &cli.errata),
        Command::Analyze { expr, mode, params, json } => {
            let catalog = Catalog::load(errata_for(&cli.errata, false)?)?;
            analyze(&catalog, expr, *mode, params, *json)
        }
        Command::Tables { table, diff, json } => {
            let catalog = Catalog::load(errata_for(&cli.errata, false)?)?;
            tables_cmd(&catalog, *table, diff.as_deref(), *json)
        }
    }
}

/// `validate`: one PASS/FAIL line per algebra, exit 1 on any failure.
pub fn validate(files: &[String], errata: &Option<String>) -> Result<Outcome, CliError> {
    let catalog = if files.is_empty() {
        Catalog::load(errata_for(errata, false)?)?
    } else {
        let texts = files.iter().map(|f| read(f).map(|t| (f.clone(), t))).collect::<Result<Vec<_>, _>>()?;
        let sources: Vec<(&str, &str)> = texts.iter().map(|(f, t)| (f.as_str(), t.as_str())).collect();
        Catalog::from_sources(&sources, errata_for(errata, true)?)?
    };
    let mut out = String::new();
    for p in catalog.applied_errata() {
        let _ = writeln!(out, "erratum {} d-line {}: {} -> {} ({})", p.algebra, p.target, p.before, p.after.join("; "), p.reason);
    }
    let mut failed = 0;
    let mut total = 0;
    for a in catalog.iter() {
        total += 1;
        let samples = a.canonical_samples(3, |_| true);
        let r = a.jacobi_check(&samples)?;
        if r.passed() {
            let _ = writeln!(out, "PASS {}", a.name);
        } else {
            failed += 1;
            let detail: Vec<String> = r
                .failures
                .iter()
                .map(|(k, f)| format!("d^2 {} = {}", a.names().label(*k), f.display_with(a.names())))
                .collect();
            let _ = writeln!(out, "FAIL {}: {}", a.name, detail.join("; "));
        }
    }
    let _ = writeln!(out, "{} algebras, {} pass, {} fail", total, total - failed, failed);
    Ok(Outcome { stdout: out, stderr: String::new(), code: i32::from(failed > 0) })
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, crate::ring::Rational>, CliError> {
    let mut out = BTreeMap::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| CliError::Usage(format!("--params expects name=value, got '{p}'")))?;
        let x = parse_rational(v.trim()).map_err(|e| CliError::Usage(format!("--params {k}: {e}")))?;
        out.insert(k.trim().to_string(), x);
    }
    Ok(out)
}

/// `analyze`: one report per branch. Verdicts never change the exit code.
pub fn analyze(catalog: &Catalog, expr: &str, mode: Mode, params: &[String], json: bool) -> Result<Outcome, CliError> {
    let mut alg = catalog.resolve(expr)?;
    let values = parse_params(params)?;
    if !values.is_empty() {
        let mut subs = BTreeMap::new();
        for (k, v) in &values {
            let var = alg
                .param(k)
                .ok_or_else(|| AlgebraError::UnknownParameter { name: alg.name.clone(), param: k.clone() })?;
            subs.insert(var.clone(), Poly::constant(v.clone()));
        }
        alg = alg.specialize(&subs)?;
    }
    let reports = decide_symplectic(&alg, mode)?;
    let matches: Vec<Option<serde_json::Value>> = reports.iter().map(|r| table_match(catalog, expr, &values, r)).collect();
    let stdout = if json {
        let mut items = Vec::new();
        for (r, m) in reports.iter().zip(&matches) {
            let mut v = serde_json::to_value(r)?;
            if let Some(obj) = v.as_object_mut() {
                obj.remove("algebra");
                obj.insert("name".into(), alg.label().into());
                if let Some(w) = &r.witness {
                    obj.insert("witness".into(), w.display_with(alg.names()).into());
                }
                obj.insert("table_match".into(), m.clone().unwrap_or(serde_json::Value::Null));
            }
            items.push(v);
        }
        serde_json::to_string_pretty(&items)? + "\n"
    } else {
        render_analysis(&alg, &reports, &matches)
    };
    Ok(Outcome { stdout, stderr: String::new(), code: 0 })
}

fn render_analysis(alg: &crate::algebra::AlgebraDef, reports: &[SymplecticReport], matches: &[Option<serde_json::Value>]) -> String {
    let mut s = String::new();
    let params: Vec<&str> = alg.params.iter().map(|p| p.var.name()).collect();
    let _ = writeln!(s, "{}: dimension {}", alg.label(), alg.dim);
    if !params.is_empty() {
        let _ = writeln!(s, "parameters: {}", params.join(", "));
    }
    for line in alg.mc_display().lines() {
        let _ = writeln!(s, "  {line}");
    }
    let n = reports.iter().filter(|r| r.symplectic).count();
    let _ = writeln!(s, "{} branch(es), {} symplectic", reports.len(), n);
    for (r, m) in reports.iter().zip(matches) {
        let branch = if r.branch.is_empty() { "all parameters".to_string() } else { r.branch_text() };
        let verdict = if r.symplectic { "symplectic" } else { "not symplectic" };
        let exact = if r.exact_symplectic { "yes" } else { "no" };
        let _ = writeln!(s, "[{branch}] {verdict}; closed 2-forms: {}; exact: {exact}; j0: {}", r.closed_space_dim, r.j0);
        if r.symplectic {
            let _ = writeln!(s, "  nondegeneracy: {} != 0", r.nondeg_display(alg));
        }
        if let Some(w) = &r.witness {
            let at: Vec<String> = r.witness_params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let at = if at.is_empty() { String::new() } else { format!(" at {}", at.join(", ")) };
            let _ = writeln!(s, "  witness{at}: {}", w.display_with(alg.names()));
        }
        if let Some(m) = m {
            let _ = writeln!(s, "  table {} row {}: {}", m["table"].as_str().unwrap_or(""), m["row"].as_str().unwrap_or(""), m["verdict"].as_str().unwrap_or(""));
        }
        for note in &r.notes {
            let _ = writeln!(s, "  note: {note}");
        }
    }
    s
}

/// The printed row, if any, whose locus contains the branch's witness point.
fn table_match(
    catalog: &Catalog,
    expr: &str,
    values: &BTreeMap<String, crate::ring::Rational>,
    r: &SymplecticReport,
) -> Option<serde_json::Value> {
    if !r.symplectic {
        return None;
    }
    let family = expr.chars().filter(|c| !c.is_whitespace()).collect::<String>();
    let mut point = r.witness_params.clone();
    for (k, v) in values {
        point.insert(crate::ring::Var::param(k), v.clone());
    }
    for t in [TableId::T1, TableId::T2, TableId::T3] {
        let expected = t.bundled_expected();
        for row in &expected.rows {
            if row.family() != tables::strip_args(&family) {
                continue;
            }
            if !tables::row_contains(catalog, row, &point).unwrap_or(false) {
                continue;
            }
            let verdict = tables::row_inputs(catalog, row)
                .ok()
                .and_then(|(a, f, c)| verify_table_entry(&a, &f, &c).ok())
                .map(|v| format!("{:?}", v.verdict).to_lowercase())
                .unwrap_or_else(|| "error".into());
            return Some(serde_json::json!({ "table": t.to_string(), "row": row.label(), "verdict": verdict }));
        }
    }
    None
}

/// `tables`: regenerated table, or the diff when an expected table is given.
pub fn tables_cmd(catalog: &Catalog, table: TableId, diff: Option<&str>, json: bool) -> Result<Outcome, CliError> {
    let expected = match diff {
        None => None,
        Some("bundled") => Some(table.bundled_expected()),
        Some(path) => Some(serde_json::from_str::<ExpectedTable>(&read(path)?)?),
    };
    let report = run_table(catalog, table, expected.as_ref())?;
    let stdout = if json { serde_json::to_string_pretty(&report)? + "\n" } else { render(&report, expected.as_ref()) };
    Ok(Outcome { stdout, stderr: String::new(), code: i32::from(!report.clean()) })
}
