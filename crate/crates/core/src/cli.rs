//! Command-line surface. Parsing and every command live here so the binary
//! stays a one-line shim and tests can drive commands in process.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{ConfigError, Format, RunConfig};
use crate::exactlin::{ComplexJson, MatrixJson};
use crate::groth::{gamma, inclusion_exclusion_expand, red_table, reduction_sum, to_formal, Mode, SegmentData};
use crate::nearby::{
    build_l, build_nbar, build_p, build_r, build_semistable_resolution, coefficient, coefficient_bruteforce,
    index_window, SheafComplex, SheafMap,
};
use crate::spectral::{e1_full, e1_page, euler_check, is_concentrated, purity_report, semistable_e1_page};
use crate::strata::{load_fiber, AnyFiber, FiberModel, SemistableFiber, StalkPoint};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "nearcyc", version, about = "Nearby-cycle resolutions, monodromy and weight bookkeeping in exact arithmetic")]
pub struct Cli {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated suite names for `verify`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub suite: Vec<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// Chain of two lines on one factor.
    Semistable,
    /// Product fiber with cohomology in the middle degree only.
    Concentrated,
    /// Product fiber without tables.
    Symbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComplexName {
    /// `L_k` on the product.
    L,
    /// `N̄ : L_k → L_{k−1}`.
    Nbar,
    P,
    R,
    /// Single-factor resolution of `R^kψ`.
    Semistable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of c^k_{l1,l2} against the brute-force count.
    CoeffTable {
        #[arg(long)]
        n: Option<usize>,
        /// Single cell `k,l1,l2`.
        #[arg(long, value_delimiter = ',')]
        cell: Option<Vec<i64>>,
    },
    /// Run verification suites and emit a report.
    Verify,
    /// Render the E1 page of a fiber.
    E1Page {
        /// Fiber JSON; overrides the config's `fiber`.
        #[arg(long)]
        fiber: Option<PathBuf>,
        #[arg(long, value_enum)]
        demo: Option<Demo>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 0)]
        q: usize,
    },
    /// Emit a named complex (or its realization at a stalk) as JSON.
    Build {
        #[arg(value_enum)]
        name: ComplexName,
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[arg(long, default_value_t = 3)]
        n1: usize,
        #[arg(long, default_value_t = 3)]
        n2: usize,
        /// Realize at the stalk `r,s`.
        #[arg(long, value_delimiter = ',')]
        realize: Option<Vec<usize>>,
    },
    /// Table of the alternating binomial collapse.
    Collapse {
        #[arg(long)]
        max: Option<u64>,
    },
    /// γ coefficients of segment data, optionally the reduced sum for `S,T`.
    Gamma {
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u64>,
        #[arg(long, default_value = "tempered")]
        mode: String,
        #[arg(long, value_delimiter = ',')]
        reduce: Option<Vec<u64>>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Rendered command output and the number of failed assertions in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub failures: usize,
}

/// Headers and string cells, shared by the CSV and table renderings.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.headers);
        out += &(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n");
        for r in &self.rows {
            out += &line(r);
        }
        out
    }
}

fn render(format: Format, value: &Value, table: &Table) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        Format::Csv => table.to_csv(),
        Format::Table => table.to_text(),
    }
}

macro_rules! cells {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

/// Loads the configuration and applies flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if !cli.suite.is_empty() {
        cfg.suites = cli.suite.clone();
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_coeff_table(cfg: &RunConfig, n: usize, cell: Option<&[i64]>) -> Outcome {
    let cells: Vec<(i64, i64, i64)> = match cell {
        Some(&[k, l1, l2]) => vec![(k, l1, l2)],
        _ => {
            let n = n as i64;
            let mut v = Vec::new();
            for k in 0..=2 * n - 2 {
                for l1 in 0..n {
                    for l2 in 0..n {
                        v.push((k, l1, l2));
                    }
                }
            }
            v
        }
    };
    let mut table = Table::new(&["k", "l1", "l2", "coefficient", "bruteforce", "window", "diff"]);
    let mut rows = Vec::new();
    let mut failures = 0;
    for (k, l1, l2) in cells {
        let c = coefficient(k, l1, l2);
        let b = coefficient_bruteforce(k, l1, l2);
        let w = index_window(k, l1, l2).len().max(0);
        let diff = c - b;
        if diff != 0 || c != w {
            failures += 1;
        }
        table.push(cells![k, l1, l2, c, b, w, diff]);
        rows.push(json!({"k": k, "l1": l1, "l2": l2, "coefficient": c, "bruteforce": b, "window": w, "diff": diff}));
    }
    let value = json!({"n": n, "mismatches": failures, "cells": rows});
    Outcome { text: render(cfg.format, &value, &table), failures }
}

pub fn cmd_verify(cfg: &RunConfig) -> Outcome {
    let report = verify::run(cfg);
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        Format::Csv => {
            let mut t = Table::new(&["suite", "check", "passed", "location", "detail"]);
            for r in &report.records {
                t.push(cells![r.suite, r.check, r.passed, serde_json::to_string(&r.location).unwrap(), r.detail]);
            }
            t.to_csv()
        }
        Format::Table => {
            let mut t = Table::new(&["suite", "passed", "failed"]);
            for (name, s) in &report.summary.suites {
                t.push(cells![name, s.passed, s.failed]);
            }
            let mut out = format!("seed {}\n", report.seed) + &t.to_text();
            for r in report.failures() {
                let _ = writeln!(out, "FAIL {}/{} {} {}", r.suite, r.check, serde_json::to_string(&r.location).unwrap(), r.detail);
            }
            out
        }
    };
    Outcome { text, failures: report.summary.failed }
}

fn product_page(cfg: &RunConfig, f: &FiberModel, pq: Option<(usize, usize)>) -> Outcome {
    let page = match pq {
        Some((p, q)) => e1_page(f, p, q, cfg.offsets),
        None => e1_full(f, cfg.offsets),
    };
    let (euler_page, euler_strata) = euler_check(f, cfg.offsets);
    let concentrated = is_concentrated(f);
    let purity = if concentrated { purity_report(f, cfg.offsets, f.dim_y()) } else { Vec::new() };
    let pure = concentrated && purity.iter().all(|r| r.passed);
    let failures = purity.iter().filter(|r| !r.passed).count() + usize::from(euler_page != euler_strata);

    let rows = page.rows();
    let mut table = Table::new(&["k", "m", "p", "q", "a", "b", "j", "twist", "dim", "weight"]);
    for r in &rows {
        table.push(cells![r.k, r.m, r.p, r.q, r.a, r.b, r.j, r.twist, r.dim, r.weight]);
    }
    let value = json!({
        "kind": "product",
        "symbolic": page.symbolic,
        "pure": pure,
        "target_degree": f.dim_y(),
        "euler": {"page": euler_page, "strata": euler_strata},
        "entries": rows,
    });
    let mut text = render(cfg.format, &value, &table);
    if cfg.format == Format::Table {
        let _ = writeln!(
            text,
            "{}{}euler {euler_page} / {euler_strata}",
            if page.symbolic { "symbolic  " } else { "" },
            if pure { "pure  " } else { "" }
        );
    }
    Outcome { text, failures }
}

fn semistable_page(cfg: &RunConfig, f: &SemistableFiber) -> Outcome {
    let page = semistable_e1_page(f, cfg.offsets);
    let mut table = Table::new(&["r", "m", "stratum", "j", "twist", "dim", "weight"]);
    for e in &page {
        table.push(cells![e.r, e.m, e.stratum, e.j, e.twist, e.dim, e.weight]);
    }
    let value = json!({"kind": "semistable", "n": f.n, "m": f.m, "entries": page});
    Outcome { text: render(cfg.format, &value, &table), failures: 0 }
}

pub fn cmd_e1_page(
    cfg: &RunConfig,
    fiber: Option<&PathBuf>,
    demo: Option<Demo>,
    n: usize,
    pq: Option<(usize, usize)>,
) -> Result<Outcome, CliError> {
    let bad = |e: crate::strata::StrataError| CliError::Usage(e.to_string());
    let source = fiber.or(cfg.fiber.as_ref());
    let model = match (source, demo) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            load_fiber(&text).map_err(bad)?
        }
        (None, Some(Demo::Concentrated)) => AnyFiber::Product(FiberModel::concentrated(n, n, n, 1).map_err(bad)?),
        (None, Some(Demo::Symbolic)) => AnyFiber::Product(FiberModel::new(n, n, n).map_err(bad)?),
        (None, Some(Demo::Semistable) | None) => AnyFiber::Semistable(SemistableFiber::chain_of_lines(2)),
    };
    Ok(match model {
        AnyFiber::Product(f) => product_page(cfg, &f, pq),
        AnyFiber::Semistable(f) => semistable_page(cfg, &f),
    })
}

fn complex_table(c: &SheafComplex) -> Table {
    let mut t = Table::new(&["degree", "l1", "l2", "twist", "copies"]);
    for d in c.lo()..c.hi_exclusive() {
        for term in c.terms(d) {
            let l2 = term.l2.map_or("-".to_string(), |x| x.to_string());
            let copies: Vec<String> = term.copy_labels.iter().map(|x| x.to_string()).collect();
            t.push(cells![d, term.l1, l2, term.twist, copies.join(" ")]);
        }
    }
    t
}

fn map_json(m: &SheafMap, at: StalkPoint) -> Result<Value, CliError> {
    let f = m.realize(&at).map_err(|e| CliError::Failed(e.to_string()))?;
    let comps: BTreeMap<i64, MatrixJson> =
        f.source().degrees().map(|d| (d, MatrixJson::from(f.component(d).as_ref()))).collect();
    Ok(json!({
        "source": ComplexJson::from(f.source()),
        "target": ComplexJson::from(f.target()),
        "components": comps,
    }))
}

pub fn cmd_build(cfg: &RunConfig, name: ComplexName, k: i64, n1: usize, n2: usize, realize: Option<(usize, usize)>) -> Result<Outcome, CliError> {
    let complex = match name {
        ComplexName::L => Some(build_l(k, n1, n2)),
        ComplexName::P => Some(build_p(k, n1, n2)),
        ComplexName::R => Some(build_r(k, n1, n2)),
        ComplexName::Semistable => Some(build_semistable_resolution(k.max(0) as usize, n1)),
        ComplexName::Nbar => None,
    };
    let at = realize.map(|(r, s)| StalkPoint::new(r, s));
    let (value, table) = match (complex, at) {
        (Some(c), None) => (serde_json::to_value(&c).expect("serializable"), complex_table(&c)),
        (Some(c), Some(at)) => {
            let real = c.realize_checked(&at).map_err(|e| CliError::Failed(e.to_string()))?;
            let mut t = Table::new(&["degree", "dim", "homology"]);
            let h = real.homology();
            for d in real.degrees() {
                t.push(cells![d, real.dim(d), h.get(d)]);
            }
            (serde_json::to_value(ComplexJson::from(&real)).expect("serializable"), t)
        }
        (None, None) => {
            let m = build_nbar(k, n1, n2);
            (serde_json::to_value(&m).expect("serializable"), complex_table(&m.source))
        }
        (None, Some(at)) => {
            let m = build_nbar(k, n1, n2);
            (map_json(&m, at)?, complex_table(&m.source))
        }
    };
    Ok(Outcome { text: render(cfg.format, &value, &table), failures: 0 })
}

pub fn cmd_collapse(cfg: &RunConfig, max: u64) -> Outcome {
    let mut table = Table::new(&["S", "s", "value", "expected"]);
    let mut rows = Vec::new();
    let mut failures = 0;
    for s in 1..=max {
        for size in 1..=s {
            let v = crate::groth::collapse_sum(size, s, s);
            let want = i64::from(size == s);
            failures += usize::from(v != want);
            table.push(cells![size, s, v, want]);
            rows.push(json!({"S": size, "s": s, "value": v, "expected": want}));
        }
    }
    let value = json!({"max": max, "mismatches": failures, "rows": rows});
    Outcome { text: render(cfg.format, &value, &table), failures }
}

pub fn cmd_gamma(cfg: &RunConfig, s: Vec<u64>, mode: &str, reduce: Option<(u64, u64)>) -> Result<Outcome, CliError> {
    let seg = match mode {
        "tempered" => SegmentData::tempered(s),
        "quarter-shifted" => SegmentData::quarter_shifted(s),
        other => return Err(CliError::Usage(format!("unknown mode {other:?} (tempered, quarter-shifted)"))),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let n = seg.n();
    let mut failures = 0;
    if let Some((a, b)) = reduce {
        let red = reduction_sum(a, b, &seg, cfg.offsets).map_err(|e| CliError::Usage(e.to_string()))?;
        let table_h = red_table(&seg, cfg.offsets).map_err(|e| CliError::Failed(e.to_string()))?;
        let agrees = inclusion_exclusion_expand(a, b, n, &table_h) == to_formal(&red);
        failures += usize::from(!agrees);
        let mut table = Table::new(&["term", "coefficient", "weight"]);
        for r in &red {
            table.push(cells![r.term, r.coefficient, r.weight]);
        }
        let value = json!({"segments": seg, "S": a, "T": b, "expansion_agrees": agrees, "terms": red});
        return Ok(Outcome { text: render(cfg.format, &value, &table), failures });
    }
    let mut table = Table::new(&["h1", "h2", "j1", "j2", "gamma", "oracle"]);
    let mut rows = Vec::new();
    for h1 in 0..=n {
        for h2 in 0..=n {
            for j1 in 1..=seg.len() {
                for j2 in 1..=seg.len() {
                    let want = verify::gamma_oracle(h1, j1, &seg) * verify::gamma_oracle(h2, j2, &seg);
                    let got = gamma(h1, h2, j1, j2, &seg).map_err(|e| CliError::Failed(e.to_string()))?;
                    if got == 0.into() && want == 0.into() {
                        continue;
                    }
                    failures += usize::from(got != want);
                    table.push(cells![h1, h2, j1, j2, got, want]);
                    rows.push(json!({"h1": h1, "h2": h2, "j1": j1, "j2": j2, "gamma": got.to_string(), "oracle": want.to_string()}));
                }
            }
        }
    }
    let mode = match seg.mode() {
        Mode::Tempered => "tempered",
        Mode::QuarterShifted => "quarter-shifted",
    };
    let value = json!({"segments": seg.s(), "n": n, "mode": mode, "mismatches": failures, "rows": rows});
    Ok(Outcome { text: render(cfg.format, &value, &table), failures })
}

fn pair(v: &Option<Vec<u64>>) -> Option<(u64, u64)> {
    v.as_ref().map(|v| (v[0], v[1]))
}

fn arity<T>(flag: &str, v: &Option<Vec<T>>, want: usize) -> Result<(), CliError> {
    match v {
        Some(v) if v.len() != want => Err(CliError::Usage(format!("--{flag} takes {want} comma-separated values"))),
        _ => Ok(()),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::CoeffTable { cell, .. } => arity("cell", cell, 3)?,
        Command::Build { realize, .. } => arity("realize", realize, 2)?,
        Command::Gamma { reduce, .. } => arity("reduce", reduce, 2)?,
        _ => {}
    }
    match &cli.command {
        Command::CoeffTable { n, cell } => Ok(cmd_coeff_table(&cfg, n.unwrap_or(cfg.ranges.n_max), cell.as_deref())),
        Command::Verify => Ok(cmd_verify(&cfg)),
        Command::E1Page { fiber, demo, n, p, q } => cmd_e1_page(&cfg, fiber.as_ref(), *demo, *n, p.map(|p| (p, *q))),
        Command::Build { name, k, n1, n2, realize } => {
            cmd_build(&cfg, *name, *k, *n1, *n2, realize.as_ref().map(|v| (v[0], v[1])))
        }
        Command::Collapse { max } => Ok(cmd_collapse(&cfg, max.unwrap_or(cfg.ranges.collapse_max))),
        Command::Gamma { s, mode, reduce } => cmd_gamma(&cfg, s.clone(), mode, pair(reduce)),
    }
}

/// Parses `args`, runs the command and writes its output. Returns the exit
/// code: 0 when every assertion passed, 1 on failures, 2 on usage errors.
pub fn run_with<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e @ (CliError::Config(_) | CliError::Usage(_))) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let out_path = cli.out.clone().or_else(|| resolve_config(&cli).ok().and_then(|c| c.out));
    match out_path {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &outcome.text) {
                let _ = writeln!(stderr, "error: {}", CliError::Io { path, source: e });
                return 1;
            }
        }
        None => {
            let _ = stdout.write_all(outcome.text.as_bytes());
        }
    }
    if outcome.failures > 0 {
        let _ = writeln!(stderr, "{} assertion(s) failed", outcome.failures);
        1
    } else {
        0
    }
}

pub fn main() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
