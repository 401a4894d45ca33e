//! Task files, the built-in example library, and the command line front
//! end.
//!
//! A task document is a line-oriented text file.  Lines are independent,
//! `#` starts a comment, and the first word of each line is a keyword:
//!
//! ```text
//! name      NAME                     optional document name
//! dimension N                        required, before everything else
//! coordinates X0 X1 ...              exactly N identifiers
//! metric I J EXPR                    component (I, J), symmetric fill
//! boundary_metric I J EXPR           over the tangential coordinates
//! conformal_factor EXPR              rescales the metric by its square
//! unknown_weights W ...              symbol system block, all three
//! interior_weights W ...             weight lines together; entries
//! boundary_weights W ...             default to zero
//! interior R C EXPR                  polynomial in xi0 .. xi{N-1}
//! boundary R C EXPR
//! task NAME KEY=VALUE ...
//! ```
//!
//! Expressions run to the end of the line and use the kernel grammar
//! over the declared coordinates (or the symbol variables `xi0 ..` for
//! operator entries).  Unspecified metric or operator entries are zero.
//! The task vocabulary:
//!
//! ```text
//! check_einstein [constant=C]            Ric = C g, default C = -(n-1)
//! bach expect=zero|nonzero|report        both Weyl and Cotton routes
//! fg_expand order=P                      needs boundary_metric
//! obstruction [leading=true] expect=...  metric is the boundary metric
//! bvp_verify [scalar_constant=C]         standalone identity battery
//! adn_check [dimension=N] [samples=(..);(..)] [symbolic=true]
//! complementing [samples=(..);(..)] [symbolic=true] expect=pass|fail
//! ellipticity expect=pass|fail           needs the symbol system block
//! ```
//!
//! Tasks run in order.  A task whose preconditions fail becomes an error
//! entry and the run continues.  Reports are plain text, deterministic
//! except for the per-task `time:` lines, which `Report::to_text(false)`
//! omits.
//!
//! The binary exposes the same engines directly: `check-einstein`,
//! `fg-expand`, `obstruction`, `bvp-verify`, and `adn-check` run on
//! built-in fixtures, `run FILE` executes a task file (or a built-in
//! example given its name), and `examples` lists the library.  Exit
//! codes: 0 when every task passes, 1 when any task fails, 2 for input
//! errors; for the fixture subcommands a task error entry counts as an
//! input error.

use clap::{Parser, Subcommand};
use num::{BigInt, BigRational};
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use crate::adn::{
    build_gauge_system, complementing_check, default_samples, normal_minor_check,
    uniform_ellipticity_check, ComplementingReport, SymbolSystem, TangentialCovector,
};
use crate::bvp;
use crate::error::WorkbenchError;
use crate::expr::{parse_scalar, Constant, ScalarExpr, VarTable};
use crate::fg::{fg_expand, tangential_einstein_residual, GeodesicSeriesMetric};
use crate::obstruction::{bach_via_cotton, bach_via_weyl, fg_obstruction, obstruction_leading};
use crate::tensor::{indices, Chart, Geometry, Scalar, Tensor, Variance};

/// Expected outcome of a tensor-valued task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Zero,
    Nonzero,
    Report,
}

impl Expectation {
    fn met(self, is_zero: bool) -> bool {
        match self {
            Expectation::Zero => is_zero,
            Expectation::Nonzero => !is_zero,
            Expectation::Report => true,
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Zero => "zero",
            Expectation::Nonzero => "nonzero",
            Expectation::Report => "report",
        })
    }
}

/// Expected verdict of a boundary condition task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One entry of a document's task list, with its parsed parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum TaskSpec {
    CheckEinstein { constant: Option<BigRational> },
    Bach { expect: Expectation },
    FgExpand { order: usize },
    Obstruction { leading: bool, expect: Expectation },
    BvpVerify { scalar_constant: Option<BigRational> },
    AdnCheck { dimension: Option<usize>, samples: Vec<Vec<BigRational>>, symbolic: bool },
    Complementing { samples: Vec<Vec<BigRational>>, symbolic: bool, expect: Verdict },
    Ellipticity { expect: Verdict },
}

/// Raw data of a weighted symbol system, kept as parsed so documents
/// serialize and compare structurally.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolData {
    pub interior: Vec<Vec<ScalarExpr>>,
    pub boundary: Vec<Vec<ScalarExpr>>,
    pub unknown_weights: Vec<i64>,
    pub interior_weights: Vec<i64>,
    pub boundary_weights: Vec<i64>,
}

/// A parsed and validated task document.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskDocument {
    pub name: String,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    pub metric: Option<Vec<Vec<ScalarExpr>>>,
    pub boundary_metric: Option<Vec<Vec<ScalarExpr>>>,
    pub conformal_factor: Option<ScalarExpr>,
    pub symbol_system: Option<SymbolData>,
    pub tasks: Vec<TaskSpec>,
}

fn file_error(line: usize, message: impl Into<String>) -> WorkbenchError {
    WorkbenchError::TaskFile { line, message: message.into() }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    s.parse::<BigRational>().map_err(|_| format!("'{s}' is not a rational number"))
}

/// Covector lists look like `(3,4,0);(0,3,4)`; the parentheses are
/// optional and no whitespace is allowed inside a task parameter.
fn parse_sample_list(s: &str) -> Result<Vec<Vec<BigRational>>, String> {
    let mut out = Vec::new();
    for chunk in s.split(';') {
        let inner = chunk.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.is_empty() {
            return Err("empty covector in the sample list".into());
        }
        let mut cov = Vec::new();
        for part in inner.split(',') {
            cov.push(parse_rational(part.trim())?);
        }
        out.push(cov);
    }
    Ok(out)
}

fn sample_list_text(samples: &[Vec<BigRational>]) -> String {
    samples
        .iter()
        .map(|cov| {
            let parts: Vec<String> = cov.iter().map(|v| v.to_string()).collect();
            format!("({})", parts.join(","))
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn covector_text(cov: &[BigRational]) -> String {
    let parts: Vec<String> = cov.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Key-value parameters of a task line; every key must be consumed.
struct ParamBag {
    line: usize,
    task: String,
    entries: Vec<(String, String)>,
}

impl ParamBag {
    fn new(line: usize, task: &str, tokens: &[&str]) -> Result<Self, WorkbenchError> {
        let mut entries = Vec::new();
        for tok in tokens {
            let Some((k, v)) = tok.split_once('=') else {
                return Err(file_error(
                    line,
                    format!("task {task}: expected KEY=VALUE, found '{tok}'"),
                ));
            };
            if v.is_empty() {
                return Err(file_error(line, format!("task {task}: parameter {k} has no value")));
            }
            if entries.iter().any(|(seen, _)| seen == k) {
                return Err(file_error(line, format!("task {task}: duplicate parameter {k}")));
            }
            entries.push((k.to_string(), v.to_string()));
        }
        Ok(ParamBag { line, task: task.to_string(), entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let pos = self.entries.iter().position(|(k, _)| k == key)?;
        Some(self.entries.remove(pos).1)
    }

    fn value_parsed<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, WorkbenchError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => parse(&v).map(Some).map_err(|msg| {
                file_error(self.line, format!("task {}: parameter {key}: {msg}", self.task))
            }),
        }
    }

    fn boolean(&mut self, key: &str) -> Result<bool, WorkbenchError> {
        Ok(self
            .value_parsed(key, |s| match s {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(format!("'{other}' is not true or false")),
            })?
            .unwrap_or(false))
    }

    fn finish(self) -> Result<(), WorkbenchError> {
        if let Some((k, _)) = self.entries.first() {
            return Err(file_error(
                self.line,
                format!("task {}: unknown parameter {k}", self.task),
            ));
        }
        Ok(())
    }
}

fn parse_expectation(s: &str) -> Result<Expectation, String> {
    match s {
        "zero" => Ok(Expectation::Zero),
        "nonzero" => Ok(Expectation::Nonzero),
        "report" => Ok(Expectation::Report),
        other => Err(format!("'{other}' is not zero, nonzero, or report")),
    }
}

fn parse_verdict(s: &str) -> Result<Verdict, String> {
    match s {
        "pass" => Ok(Verdict::Pass),
        "fail" => Ok(Verdict::Fail),
        other => Err(format!("'{other}' is not pass or fail")),
    }
}

fn parse_task(line: usize, rest: &str) -> Result<TaskSpec, WorkbenchError> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    let Some((&name, params)) = tokens.split_first() else {
        return Err(file_error(line, "task line names no task"));
    };
    let mut bag = ParamBag::new(line, name, params)?;
    let spec = match name {
        "check_einstein" => TaskSpec::CheckEinstein {
            constant: bag.value_parsed("constant", parse_rational)?,
        },
        "bach" => TaskSpec::Bach {
            expect: bag
                .value_parsed("expect", parse_expectation)?
                .unwrap_or(Expectation::Report),
        },
        "fg_expand" => {
            let order = bag
                .value_parsed("order", |s| {
                    s.parse::<usize>().map_err(|_| format!("'{s}' is not an order"))
                })?
                .ok_or_else(|| file_error(line, "task fg_expand: parameter order is required"))?;
            TaskSpec::FgExpand { order }
        }
        "obstruction" => TaskSpec::Obstruction {
            leading: bag.boolean("leading")?,
            expect: bag
                .value_parsed("expect", parse_expectation)?
                .unwrap_or(Expectation::Report),
        },
        "bvp_verify" => TaskSpec::BvpVerify {
            scalar_constant: bag.value_parsed("scalar_constant", parse_rational)?,
        },
        "adn_check" => TaskSpec::AdnCheck {
            dimension: bag.value_parsed("dimension", |s| {
                s.parse::<usize>().map_err(|_| format!("'{s}' is not a dimension"))
            })?,
            samples: bag.value_parsed("samples", parse_sample_list)?.unwrap_or_default(),
            symbolic: bag.boolean("symbolic")?,
        },
        "complementing" => TaskSpec::Complementing {
            samples: bag.value_parsed("samples", parse_sample_list)?.unwrap_or_default(),
            symbolic: bag.boolean("symbolic")?,
            expect: bag.value_parsed("expect", parse_verdict)?.unwrap_or(Verdict::Pass),
        },
        "ellipticity" => TaskSpec::Ellipticity {
            expect: bag.value_parsed("expect", parse_verdict)?.unwrap_or(Verdict::Pass),
        },
        other => {
            return Err(file_error(
                line,
                format!(
                    "unknown task '{other}'; known tasks: check_einstein, bach, fg_expand, \
                     obstruction, bvp_verify, adn_check, complementing, ellipticity"
                ),
            ));
        }
    };
    bag.finish()?;
    Ok(spec)
}

fn task_line(spec: &TaskSpec) -> String {
    match spec {
        TaskSpec::CheckEinstein { constant } => match constant {
            Some(c) => format!("check_einstein constant={c}"),
            None => "check_einstein".to_string(),
        },
        TaskSpec::Bach { expect } => format!("bach expect={expect}"),
        TaskSpec::FgExpand { order } => format!("fg_expand order={order}"),
        TaskSpec::Obstruction { leading, expect } => {
            let flag = if *leading { " leading=true" } else { "" };
            format!("obstruction{flag} expect={expect}")
        }
        TaskSpec::BvpVerify { scalar_constant } => match scalar_constant {
            Some(c) => format!("bvp_verify scalar_constant={c}"),
            None => "bvp_verify".to_string(),
        },
        TaskSpec::AdnCheck { dimension, samples, symbolic } => {
            let mut s = "adn_check".to_string();
            if let Some(d) = dimension {
                s.push_str(&format!(" dimension={d}"));
            }
            if !samples.is_empty() {
                s.push_str(&format!(" samples={}", sample_list_text(samples)));
            }
            if *symbolic {
                s.push_str(" symbolic=true");
            }
            s
        }
        TaskSpec::Complementing { samples, symbolic, expect } => {
            let mut s = "complementing".to_string();
            if !samples.is_empty() {
                s.push_str(&format!(" samples={}", sample_list_text(samples)));
            }
            if *symbolic {
                s.push_str(" symbolic=true");
            }
            s.push_str(&format!(" expect={expect}"));
            s
        }
        TaskSpec::Ellipticity { expect } => format!("ellipticity expect={expect}"),
    }
}

struct GridBuilder {
    label: &'static str,
    grid: Vec<Vec<ScalarExpr>>,
    seen: Vec<(usize, usize)>,
    symmetric: bool,
}

impl GridBuilder {
    fn new(label: &'static str, rows: usize, cols: usize, vars: &Arc<VarTable>, symmetric: bool) -> Self {
        let zero = ScalarExpr::zero(vars);
        GridBuilder { label, grid: vec![vec![zero; cols]; rows], seen: Vec::new(), symmetric }
    }

    /// Callers bounds-check the indices before storing.
    fn set(&mut self, line: usize, i: usize, j: usize, e: ScalarExpr) -> Result<(), WorkbenchError> {
        let key = if self.symmetric { (i.min(j), i.max(j)) } else { (i, j) };
        if self.seen.contains(&key) {
            return Err(file_error(
                line,
                format!("duplicate {} entry ({i}, {j})", self.label),
            ));
        }
        self.seen.push(key);
        self.grid[i][j] = e.clone();
        if self.symmetric {
            self.grid[j][i] = e;
        }
        Ok(())
    }
}

/// Parses a task document.  The fallback name applies when the source
/// has no `name` line.
pub fn parse_task_document(source: &str, fallback_name: &str) -> Result<TaskDocument, WorkbenchError> {
    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut coordinates: Option<Vec<String>> = None;
    let mut coord_vars: Option<Arc<VarTable>> = None;
    let mut tangential_vars: Option<Arc<VarTable>> = None;
    let mut symbol_vars: Option<Arc<VarTable>> = None;
    let mut metric: Option<GridBuilder> = None;
    let mut boundary_metric: Option<GridBuilder> = None;
    let mut conformal_factor: Option<ScalarExpr> = None;
    let mut unknown_weights: Option<Vec<i64>> = None;
    let mut interior_weights: Option<Vec<i64>> = None;
    let mut boundary_weights: Option<Vec<i64>> = None;
    let mut interior_entries: Vec<(usize, usize, usize, ScalarExpr)> = Vec::new();
    let mut boundary_entries: Vec<(usize, usize, usize, ScalarExpr)> = Vec::new();
    let mut symbol_line: Option<usize> = None;
    let mut tasks: Vec<TaskSpec> = Vec::new();

    let need_dim = |dimension: &Option<usize>, line: usize, what: &str| {
        dimension.ok_or_else(|| file_error(line, format!("{what} needs dimension declared first")))
    };

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = match content.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (content, ""),
        };
        match keyword {
            "name" => {
                if rest.is_empty() {
                    return Err(file_error(line, "name line is empty"));
                }
                name = Some(rest.to_string());
            }
            "dimension" => {
                if dimension.is_some() {
                    return Err(file_error(line, "dimension declared twice"));
                }
                let n: usize = rest
                    .parse()
                    .map_err(|_| file_error(line, format!("'{rest}' is not a dimension")))?;
                if n < 2 {
                    return Err(file_error(line, "dimension must be at least 2"));
                }
                dimension = Some(n);
            }
            "coordinates" => {
                let n = need_dim(&dimension, line, "coordinates")?;
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.len() != n {
                    return Err(file_error(
                        line,
                        format!("expected {n} coordinate names, found {}", names.len()),
                    ));
                }
                for c in &names {
                    if !is_identifier(c) || c == "I" || c == "sqrt" {
                        return Err(file_error(line, format!("'{c}' is not a usable coordinate name")));
                    }
                }
                if (1..names.len()).any(|i| names[..i].contains(&names[i])) {
                    return Err(file_error(line, "coordinate names repeat"));
                }
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                coord_vars = Some(VarTable::new(&refs));
                let tang: Vec<&str> = refs[1..].to_vec();
                tangential_vars = Some(VarTable::new(&tang));
                let xi: Vec<String> = (0..n).map(|i| format!("xi{i}")).collect();
                let xi_refs: Vec<&str> = xi.iter().map(String::as_str).collect();
                symbol_vars = Some(VarTable::new(&xi_refs));
                coordinates = Some(names);
            }
            "metric" | "boundary_metric" => {
                let n = need_dim(&dimension, line, keyword)?;
                let (vars, size, slot): (&Arc<VarTable>, usize, &mut Option<GridBuilder>) =
                    if keyword == "metric" {
                        let vars = coord_vars.as_ref().ok_or_else(|| {
                            file_error(line, "metric entries need coordinates declared first")
                        })?;
                        (vars, n, &mut metric)
                    } else {
                        let vars = tangential_vars.as_ref().ok_or_else(|| {
                            file_error(line, "boundary_metric entries need coordinates declared first")
                        })?;
                        (vars, n - 1, &mut boundary_metric)
                    };
                let (i, j, expr) = parse_indexed_entry(line, keyword, rest, size, size, vars)?;
                slot.get_or_insert_with(|| GridBuilder::new(
                    if keyword == "metric" { "metric" } else { "boundary_metric" },
                    size,
                    size,
                    vars,
                    true,
                ))
                .set(line, i, j, expr)?;
            }
            "conformal_factor" => {
                let vars = coord_vars.as_ref().ok_or_else(|| {
                    file_error(line, "conformal_factor needs coordinates declared first")
                })?;
                if conformal_factor.is_some() {
                    return Err(file_error(line, "conformal_factor declared twice"));
                }
                conformal_factor = Some(parse_expression(line, rest, vars)?);
            }
            "unknown_weights" | "interior_weights" | "boundary_weights" => {
                symbol_line.get_or_insert(line);
                let mut ws = Vec::new();
                for tok in rest.split_whitespace() {
                    ws.push(tok.parse::<i64>().map_err(|_| {
                        file_error(line, format!("'{tok}' is not an integer weight"))
                    })?);
                }
                if ws.is_empty() {
                    return Err(file_error(line, format!("{keyword} line lists no weights")));
                }
                let slot = match keyword {
                    "unknown_weights" => &mut unknown_weights,
                    "interior_weights" => &mut interior_weights,
                    _ => &mut boundary_weights,
                };
                if slot.is_some() {
                    return Err(file_error(line, format!("{keyword} declared twice")));
                }
                *slot = Some(ws);
            }
            "interior" | "boundary" => {
                need_dim(&dimension, line, keyword)?;
                symbol_line.get_or_insert(line);
                let vars = symbol_vars.as_ref().ok_or_else(|| {
                    file_error(line, "operator entries need coordinates declared first")
                })?;
                let (r, c, expr) =
                    parse_indexed_entry(line, keyword, rest, usize::MAX, usize::MAX, vars)?;
                if keyword == "interior" {
                    interior_entries.push((line, r, c, expr));
                } else {
                    boundary_entries.push((line, r, c, expr));
                }
            }
            "task" => {
                need_dim(&dimension, line, "task")?;
                tasks.push(parse_task(line, rest)?);
            }
            other => {
                return Err(file_error(line, format!("unknown keyword '{other}'")));
            }
        }
    }

    let dimension = dimension.ok_or_else(|| file_error(0, "the document declares no dimension"))?;
    let coordinates =
        coordinates.ok_or_else(|| file_error(0, "the document declares no coordinates"))?;

    let symbol_present = symbol_line.is_some();
    let symbol_system = if symbol_present {
        let at = symbol_line.unwrap_or(0);
        let uw = unknown_weights
            .ok_or_else(|| file_error(at, "the symbol system block needs unknown_weights"))?;
        let iw = interior_weights
            .ok_or_else(|| file_error(at, "the symbol system block needs interior_weights"))?;
        let bw = boundary_weights
            .ok_or_else(|| file_error(at, "the symbol system block needs boundary_weights"))?;
        let n_unknowns = uw.len();
        if iw.len() != n_unknowns {
            return Err(file_error(
                at,
                format!(
                    "interior_weights lists {} weights for {n_unknowns} unknowns",
                    iw.len()
                ),
            ));
        }
        let m_rows = bw.len();
        let vars = symbol_vars.as_ref().expect("coordinates were validated");
        let mut interior = GridBuilder::new("interior", n_unknowns, n_unknowns, vars, false);
        for (line, r, c, e) in interior_entries {
            if r >= n_unknowns || c >= n_unknowns {
                return Err(file_error(
                    line,
                    format!("interior entry ({r}, {c}) is outside the {n_unknowns} unknowns"),
                ));
            }
            interior.set(line, r, c, e)?;
        }
        let mut boundary = GridBuilder::new("boundary", m_rows, n_unknowns, vars, false);
        for (line, r, c, e) in boundary_entries {
            if r >= m_rows || c >= n_unknowns {
                return Err(file_error(
                    line,
                    format!(
                        "boundary entry ({r}, {c}) is outside {m_rows} rows by {n_unknowns} columns"
                    ),
                ));
            }
            boundary.set(line, r, c, e)?;
        }
        let data = SymbolData {
            interior: interior.grid,
            boundary: boundary.grid,
            unknown_weights: uw,
            interior_weights: iw,
            boundary_weights: bw,
        };
        SymbolSystem::new(
            data.interior.clone(),
            data.boundary.clone(),
            data.unknown_weights.clone(),
            data.interior_weights.clone(),
            data.boundary_weights.clone(),
        )
        .map_err(|e| file_error(at, format!("the symbol system does not validate: {e}")))?;
        Some(data)
    } else {
        None
    };

    Ok(TaskDocument {
        name: name.unwrap_or_else(|| fallback_name.to_string()),
        dimension,
        coordinates,
        metric: metric.map(|b| b.grid),
        boundary_metric: boundary_metric.map(|b| b.grid),
        conformal_factor,
        symbol_system,
        tasks,
    })
}

fn parse_indexed_entry(
    line: usize,
    keyword: &str,
    rest: &str,
    rows: usize,
    cols: usize,
    vars: &Arc<VarTable>,
) -> Result<(usize, usize, ScalarExpr), WorkbenchError> {
    let mut parts = rest.splitn(3, char::is_whitespace);
    let (Some(si), Some(sj), Some(se)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(file_error(line, format!("{keyword} lines read: {keyword} I J EXPR")));
    };
    let i: usize =
        si.parse().map_err(|_| file_error(line, format!("'{si}' is not an index")))?;
    let j: usize =
        sj.parse().map_err(|_| file_error(line, format!("'{sj}' is not an index")))?;
    if i >= rows || j >= cols {
        return Err(file_error(
            line,
            format!("{keyword} entry ({i}, {j}) is outside {rows} by {cols}"),
        ));
    }
    Ok((i, j, parse_expression(line, se.trim(), vars)?))
}

fn parse_expression(
    line: usize,
    src: &str,
    vars: &Arc<VarTable>,
) -> Result<ScalarExpr, WorkbenchError> {
    parse_scalar(vars, src).map_err(|e| file_error(line, format!("{e}")))
}

impl TaskDocument {
    /// Canonical text form; parsing it back reproduces the document.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("name {}\n", self.name));
        }
        out.push_str(&format!("dimension {}\n", self.dimension));
        out.push_str(&format!("coordinates {}\n", self.coordinates.join(" ")));
        if let Some(g) = &self.metric {
            for i in 0..g.len() {
                for j in i..g.len() {
                    if !g[i][j].is_zero() {
                        out.push_str(&format!("metric {i} {j} {}\n", g[i][j]));
                    }
                }
            }
        }
        if let Some(f) = &self.conformal_factor {
            out.push_str(&format!("conformal_factor {f}\n"));
        }
        if let Some(h) = &self.boundary_metric {
            for i in 0..h.len() {
                for j in i..h.len() {
                    if !h[i][j].is_zero() {
                        out.push_str(&format!("boundary_metric {i} {j} {}\n", h[i][j]));
                    }
                }
            }
        }
        if let Some(sd) = &self.symbol_system {
            let fmt_w = |ws: &[i64]| {
                ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
            };
            out.push_str(&format!("unknown_weights {}\n", fmt_w(&sd.unknown_weights)));
            out.push_str(&format!("interior_weights {}\n", fmt_w(&sd.interior_weights)));
            out.push_str(&format!("boundary_weights {}\n", fmt_w(&sd.boundary_weights)));
            for (r, row) in sd.interior.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    if !e.is_zero() {
                        out.push_str(&format!("interior {r} {c} {e}\n"));
                    }
                }
            }
            for (r, row) in sd.boundary.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    if !e.is_zero() {
                        out.push_str(&format!("boundary {r} {c} {e}\n"));
                    }
                }
            }
        }
        for spec in &self.tasks {
            out.push_str(&format!("task {}\n", task_line(spec)));
        }
        out
    }

    /// Geometry of the document metric, rescaled by the square of the
    /// conformal factor when one is declared.
    pub fn bulk_geometry(&self) -> Result<Geometry<ScalarExpr>, WorkbenchError> {
        let grid = self.metric.as_ref().ok_or_else(|| {
            WorkbenchError::Precondition("the document declares no metric".into())
        })?;
        let vars = grid[0][0].vars().clone();
        let n = self.dimension;
        let chart = Chart::of_all(&vars);
        let mut g = Tensor::zeros(n, &[Variance::Down, Variance::Down], &ScalarExpr::zero(&vars));
        for i in 0..n {
            for j in 0..n {
                g.set(&[i, j], grid[i][j].clone());
            }
        }
        if let Some(f) = &self.conformal_factor {
            g = g.scale(&f.mul(f)?)?;
        }
        Geometry::new(chart, g)
    }

    /// Geometry of the boundary metric over the tangential coordinates.
    pub fn boundary_geometry(&self) -> Result<Geometry<ScalarExpr>, WorkbenchError> {
        let grid = self.boundary_metric.as_ref().ok_or_else(|| {
            WorkbenchError::Precondition("the document declares no boundary metric".into())
        })?;
        let vars = grid[0][0].vars().clone();
        let m = self.dimension - 1;
        let chart = Chart::of_all(&vars);
        let mut h = Tensor::zeros(m, &[Variance::Down, Variance::Down], &ScalarExpr::zero(&vars));
        for i in 0..m {
            for j in 0..m {
                h.set(&[i, j], grid[i][j].clone());
            }
        }
        Geometry::new(chart, h)
    }

    /// The declared symbol system, revalidated.
    pub fn symbol_system(&self) -> Result<SymbolSystem, WorkbenchError> {
        let sd = self.symbol_system.as_ref().ok_or_else(|| {
            WorkbenchError::Precondition("the document declares no symbol system".into())
        })?;
        SymbolSystem::new(
            sd.interior.clone(),
            sd.boundary.clone(),
            sd.unknown_weights.clone(),
            sd.interior_weights.clone(),
            sd.boundary_weights.clone(),
        )
    }
}

/// Status of one executed task.
#[derive(Clone, Debug, PartialEq)]
pub enum TaskStatus {
    Pass,
    Fail,
    Error(String),
}

/// Execution record of one task.
#[derive(Clone, Debug)]
pub struct TaskReport {
    pub label: String,
    pub status: TaskStatus,
    pub lines: Vec<String>,
    pub millis: u128,
}

/// Execution record of a whole document.
#[derive(Clone, Debug)]
pub struct Report {
    pub document: String,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.tasks.iter().all(|t| t.status == TaskStatus::Pass)
    }

    pub fn has_errors(&self) -> bool {
        self.tasks.iter().any(|t| matches!(t.status, TaskStatus::Error(_)))
    }

    /// Plain text rendering; the timing lines are the only
    /// nondeterministic part and are dropped when `with_timing` is false.
    pub fn to_text(&self, with_timing: bool) -> String {
        let mut out = String::new();
        out.push_str(&format!("document: {}\n", self.document));
        let mut passed = 0usize;
        let mut failed = 0usize;
        let mut errors = 0usize;
        for t in &self.tasks {
            out.push('\n');
            out.push_str(&format!("task: {}\n", t.label));
            match &t.status {
                TaskStatus::Pass => {
                    passed += 1;
                    out.push_str("  status: pass\n");
                }
                TaskStatus::Fail => {
                    failed += 1;
                    out.push_str("  status: fail\n");
                }
                TaskStatus::Error(msg) => {
                    errors += 1;
                    out.push_str(&format!("  status: error: {msg}\n"));
                }
            }
            for l in &t.lines {
                out.push_str(&format!("  {l}\n"));
            }
            if with_timing {
                out.push_str(&format!("  time: {} ms\n", t.millis));
            }
        }
        out.push_str(&format!(
            "\nsummary: {passed} passed, {failed} failed, {errors} errors\n"
        ));
        out
    }
}

/// Runs every task of a document in order; failures and precondition
/// errors are recorded per task and never abort the run.
pub fn run_document(doc: &TaskDocument) -> Report {
    let mut tasks = Vec::new();
    for spec in &doc.tasks {
        let start = Instant::now();
        let (status, lines) = match execute_task(doc, spec) {
            Ok((true, lines)) => (TaskStatus::Pass, lines),
            Ok((false, lines)) => (TaskStatus::Fail, lines),
            Err(e) => (TaskStatus::Error(e.to_string()), Vec::new()),
        };
        tasks.push(TaskReport {
            label: task_line(spec),
            status,
            lines,
            millis: start.elapsed().as_millis(),
        });
    }
    Report { document: doc.name.clone(), tasks }
}

/// Parses and runs a task file; the document name defaults to the file
/// stem.
pub fn run_task_file(path: &Path) -> Result<Report, WorkbenchError> {
    let source = std::fs::read_to_string(path).map_err(|e| WorkbenchError::TaskFile {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("task");
    let doc = parse_task_document(&source, stem)?;
    Ok(run_document(&doc))
}

fn tensor_lines<S: Scalar>(label: &str, t: &Tensor<S>) -> Vec<String> {
    if t.is_zero() {
        return vec![format!("{label}: all components zero")];
    }
    let mut out = vec![format!("{label}: nonzero components")];
    for idx in indices(t.dim(), t.rank()) {
        let c = t.get(&idx);
        if !c.is_zero() {
            let tags: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
            out.push(format!("  {label}[{}] = {c}", tags.join(", ")));
        }
    }
    out
}

fn pass_tag(p: bool) -> &'static str {
    if p {
        "pass "
    } else {
        "FAIL "
    }
}

fn execute_task(doc: &TaskDocument, spec: &TaskSpec) -> Result<(bool, Vec<String>), WorkbenchError> {
    match spec {
        TaskSpec::CheckEinstein { constant } => {
            let geom = doc.bulk_geometry()?;
            let n = geom.dim();
            let lam = constant
                .clone()
                .unwrap_or_else(|| BigRational::from_integer(BigInt::from(1 - n as i64)));
            let vars = geom.metric().get(&[0, 0]).vars().clone();
            let lam_expr = ScalarExpr::constant(&vars, Constant::from_rational(lam.clone()));
            let resid = geom.ricci()?.sub(&geom.metric().scale(&lam_expr)?)?;
            let expected_s = ScalarExpr::constant(
                &vars,
                Constant::from_rational(lam.clone() * BigRational::from_integer(BigInt::from(n as i64))),
            );
            let s_resid = geom.scalar_curvature()?.sub(&expected_s)?;
            let pass = resid.is_zero() && s_resid.is_zero();
            let mut lines = vec![format!("Einstein constant: {lam}")];
            lines.extend(tensor_lines("Ricci residual", &resid));
            lines.push(format!("scalar curvature residual: {s_resid}"));
            Ok((pass, lines))
        }
        TaskSpec::Bach { expect } => {
            let geom = doc.bulk_geometry()?;
            let via_weyl = bach_via_weyl(&geom)?;
            let via_cotton = bach_via_cotton(&geom)?;
            let agree = via_weyl.sub(&via_cotton)?.is_zero();
            let zero = via_weyl.is_zero();
            let mut lines = vec![format!("Weyl and Cotton routes agree: {agree}")];
            lines.extend(tensor_lines("Bach tensor", &via_weyl));
            Ok((agree && expect.met(zero), lines))
        }
        TaskSpec::FgExpand { order } => {
            let h = doc.boundary_geometry()?;
            let n = doc.dimension;
            let expansion = fg_expand(&h, n, *order)?;
            let mut lines = Vec::new();
            for p in 1..=*order {
                lines.extend(tensor_lines(&format!("g({p})"), expansion.coefficient(p)));
            }
            if *order == 0 {
                lines.extend(tensor_lines("g(0)", expansion.coefficient(0)));
                return Ok((true, lines));
            }
            // Coefficients beyond the computed order are padded with
            // zeros, which only pollutes residual orders >= the computed
            // order; everything below must vanish exactly.
            let mut padded = expansion.coefficients().to_vec();
            let zero_t = expansion.coefficient(0).scale_frac(0, 1);
            while padded.len() < 3 {
                padded.push(zero_t.clone());
            }
            let series = GeodesicSeriesMetric::from_coefficients(&h, &padded)?;
            let geom = series.geometry();
            let m = n - 1;
            let tang: Vec<&str> = (1..geom.dim()).map(|a| geom.chart().coord_name(a)).collect();
            let chart = Chart::new(geom.chart().vars(), &tang)?;
            let block = Tensor::from_fn(m, &[Variance::Down, Variance::Down], |idx| {
                Ok(geom.metric().get(&[idx[0] + 1, idx[1] + 1]).clone())
            })?;
            let e = tangential_einstein_residual(&chart, &block, n)?;
            let upto = *order - 1;
            let mut clean = true;
            for comp in e.components() {
                if comp.order() < upto {
                    return Err(WorkbenchError::Precondition(format!(
                        "the residual jet carries order {} but order {upto} is needed",
                        comp.order()
                    )));
                }
                for k in 0..=upto {
                    if !comp.coeff(k).is_zero() {
                        clean = false;
                    }
                }
            }
            lines.push(format!(
                "tangential Einstein residual vanishes through transverse order {upto}: {clean}"
            ));
            Ok((clean, lines))
        }
        TaskSpec::Obstruction { leading, expect } => {
            let geom = doc.bulk_geometry()?;
            let (label, t) = if *leading {
                ("leading obstruction", obstruction_leading(&geom)?)
            } else {
                ("obstruction tensor", fg_obstruction(&geom, doc.dimension)?)
            };
            let zero = t.is_zero();
            Ok((expect.met(zero), tensor_lines(label, &t)))
        }
        TaskSpec::BvpVerify { scalar_constant } => {
            let rep = bvp::standard_report(scalar_constant.clone())?;
            let mut lines =
                vec![format!("scalar curvature constant: {}", rep.scalar_constant)];
            for c in &rep.checks {
                lines.push(format!("{}{}", pass_tag(c.pass), c.name));
            }
            Ok((rep.all_pass(), lines))
        }
        TaskSpec::AdnCheck { dimension, samples, symbolic } => {
            let dim = dimension.unwrap_or(doc.dimension);
            let sys = build_gauge_system(dim)?;
            let mut all = true;
            let mut lines = vec![format!(
                "gauge system in dimension {dim}: {} unknowns, {} boundary rows",
                sys.unknowns(),
                sys.boundary_rows()
            )];
            let ell = uniform_ellipticity_check(&sys)?;
            all &= ell.pass;
            lines.push(format!("{}uniform ellipticity: {}", pass_tag(ell.pass), ell.detail));
            let list = if samples.is_empty() { default_samples(dim)? } else { samples.clone() };
            for s in &list {
                let cov = TangentialCovector::Numeric(s.clone());
                let rep = complementing_check(&sys, &cov)?;
                all &= rep.pass;
                lines.push(format!(
                    "{}complementing at xi = {}: {}",
                    pass_tag(rep.pass),
                    covector_text(s),
                    complementing_text(&rep)
                ));
                let minor = normal_minor_check(dim, &cov)?;
                all &= minor.pass;
                lines.push(format!(
                    "{}normal minor at xi = {}: determinant nonzero {}, spectrum confirmed {}",
                    pass_tag(minor.pass),
                    covector_text(s),
                    minor.determinant_nonzero,
                    minor.eigenvalues_confirmed
                ));
            }
            if *symbolic {
                let rep = complementing_check(&sys, &TangentialCovector::Symbolic)?;
                all &= rep.pass;
                lines.push(format!(
                    "{}complementing, symbolic covector: {}",
                    pass_tag(rep.pass),
                    complementing_text(&rep)
                ));
                let minor = normal_minor_check(dim, &TangentialCovector::Symbolic)?;
                all &= minor.pass;
                lines.push(format!(
                    "{}normal minor, symbolic covector: determinant nonzero {}, spectrum confirmed {}",
                    pass_tag(minor.pass),
                    minor.determinant_nonzero,
                    minor.eigenvalues_confirmed
                ));
            }
            Ok((all, lines))
        }
        TaskSpec::Complementing { samples, symbolic, expect } => {
            let sys = doc.symbol_system()?;
            if samples.is_empty() && !*symbolic {
                return Err(WorkbenchError::Precondition(
                    "the complementing task needs samples or symbolic=true".into(),
                ));
            }
            let mut all = true;
            let mut lines = Vec::new();
            let mut judge = |rep: &ComplementingReport, label: String, lines: &mut Vec<String>| {
                let ok = match expect {
                    Verdict::Pass => rep.pass,
                    Verdict::Fail => !rep.pass && rep.certificate.is_some(),
                };
                all &= ok;
                lines.push(format!("{}{label}: {}", pass_tag(ok), complementing_text(rep)));
                if let Some(cert) = &rep.certificate {
                    lines.push(format!("  kernel certificate: {cert}"));
                }
            };
            for s in samples {
                let rep = complementing_check(&sys, &TangentialCovector::Numeric(s.clone()))?;
                judge(&rep, format!("complementing at xi = {}", covector_text(s)), &mut lines);
            }
            if *symbolic {
                let rep = complementing_check(&sys, &TangentialCovector::Symbolic)?;
                judge(&rep, "complementing, symbolic covector".to_string(), &mut lines);
            }
            Ok((all, lines))
        }
        TaskSpec::Ellipticity { expect } => {
            let rep = uniform_ellipticity_check(&doc.symbol_system()?)?;
            let ok = match expect {
                Verdict::Pass => rep.pass,
                Verdict::Fail => !rep.pass,
            };
            let lines = vec![format!("{}uniform ellipticity: {}", pass_tag(ok), rep.detail)];
            Ok((ok, lines))
        }
    }
}

fn complementing_text(rep: &ComplementingReport) -> String {
    format!(
        "rank {} of {}, modulus degree {}, factored out {}, {}",
        rep.rank, rep.required_rank, rep.modulus_degree, rep.factored_out, rep.root_description
    )
}

const EXAMPLES: &[(&str, &str)] = &[
    (
        "hyperbolic_einstein_n4",
        "# Hyperbolic half-space in dimension four: the model Einstein metric.\n\
         dimension 4\n\
         coordinates x0 x1 x2 x3\n\
         metric 0 0 1/x0^2\n\
         metric 1 1 1/x0^2\n\
         metric 2 2 1/x0^2\n\
         metric 3 3 1/x0^2\n\
         task check_einstein\n",
    ),
    (
        "hyperbolic_einstein_n6",
        "# Hyperbolic half-space in dimension six: the model Einstein metric.\n\
         dimension 6\n\
         coordinates x0 x1 x2 x3 x4 x5\n\
         metric 0 0 1/x0^2\n\
         metric 1 1 1/x0^2\n\
         metric 2 2 1/x0^2\n\
         metric 3 3 1/x0^2\n\
         metric 4 4 1/x0^2\n\
         metric 5 5 1/x0^2\n\
         task check_einstein\n",
    ),
    (
        "sphere_conformal_infinity",
        "# Geodesic expansion over the round three-sphere conformal infinity.\n\
         dimension 4\n\
         coordinates rho x1 x2 x3\n\
         boundary_metric 0 0 4/(1+x1^2+x2^2+x3^2)^2\n\
         boundary_metric 1 1 4/(1+x1^2+x2^2+x3^2)^2\n\
         boundary_metric 2 2 4/(1+x1^2+x2^2+x3^2)^2\n\
         task fg_expand order=2\n",
    ),
    (
        "bach_conformal_hyperbolic",
        "# Bach tensor of a conformal rescaling of the hyperbolic metric.\n\
         dimension 4\n\
         coordinates x0 x1 x2 x3\n\
         metric 0 0 1/x0^2\n\
         metric 1 1 1/x0^2\n\
         metric 2 2 1/x0^2\n\
         metric 3 3 1/x0^2\n\
         conformal_factor 1+x1^2\n\
         task bach expect=zero\n",
    ),
    (
        "obstruction_flat_n4",
        "# Ambient obstruction tensor of the flat four-dimensional metric.\n\
         dimension 4\n\
         coordinates x1 x2 x3 x4\n\
         metric 0 0 1\n\
         metric 1 1 1\n\
         metric 2 2 1\n\
         metric 3 3 1\n\
         task obstruction expect=zero\n\
         task obstruction leading=true expect=zero\n",
    ),
    (
        "boundary_identities",
        "# Boundary value problem identity battery on the built-in fixtures.\n\
         dimension 4\n\
         coordinates x0 x1 x2 x3\n\
         task bvp_verify\n",
    ),
    (
        "adn_gauge_n4",
        "# Boundary condition battery for the gauged Einstein system in dimension four.\n\
         dimension 4\n\
         coordinates x0 x1 x2 x3\n\
         task adn_check samples=(3,4,0);(0,3,4);(1,2,2) symbolic=true\n",
    ),
    (
        "oblique_failure",
        "# Oblique derivative problem that violates the complementing condition.\n\
         dimension 2\n\
         coordinates x0 x1\n\
         unknown_weights 2\n\
         interior_weights 0\n\
         boundary_weights -1\n\
         interior 0 0 xi0^2+xi1^2\n\
         boundary 0 0 xi0+I*xi1\n\
         task ellipticity expect=pass\n\
         task complementing samples=(1) expect=pass\n\
         task complementing samples=(-1) expect=fail\n",
    ),
];

/// Names of the built-in example documents, in a fixed order.
pub fn list_examples() -> Vec<&'static str> {
    EXAMPLES.iter().map(|(n, _)| *n).collect()
}

/// Source text of a built-in example.
pub fn example_source(name: &str) -> Result<&'static str, WorkbenchError> {
    EXAMPLES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            WorkbenchError::Precondition(format!(
                "unknown example '{name}'; known examples: {}",
                list_examples().join(", ")
            ))
        })
}

/// Parses a built-in example into a document named after it.
pub fn load_example(name: &str) -> Result<TaskDocument, WorkbenchError> {
    parse_task_document(example_source(name)?, name)
}

fn example_description(source: &str) -> &str {
    source
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .unwrap_or("")
        .trim_end_matches('.')
}

#[derive(Parser)]
#[command(
    name = "fglab",
    version,
    about = "Exact-arithmetic workbench for conformally compact Einstein metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify that the hyperbolic half-space metric is Einstein.
    CheckEinstein {
        /// Dimension of the half-space model.
        #[arg(long, default_value_t = 4)]
        dimension: usize,
    },
    /// Expand the round-sphere conformal infinity in geodesic normal form.
    FgExpand {
        /// Expansion order; the recursion degenerates at dimension - 1.
        #[arg(long)]
        order: usize,
        /// Bulk dimension, even and at least four.
        #[arg(long, default_value_t = 4)]
        dimension: usize,
    },
    /// Evaluate the ambient obstruction tensor of the flat boundary metric.
    Obstruction {
        /// Evaluate the leading linearized form instead of the full tensor.
        #[arg(long)]
        leading: bool,
    },
    /// Run the boundary value problem identity battery.
    BvpVerify {
        /// Scalar curvature constant of the Einstein fixtures.
        #[arg(long)]
        scalar_constant: Option<String>,
    },
    /// Run the elliptic boundary condition battery.
    AdnCheck {
        /// Tangential covectors as rational lists, e.g. "3,4,0;0,3,4".
        #[arg(long)]
        samples: Option<String>,
        /// Also run the checks with a fully symbolic tangential covector.
        #[arg(long)]
        symbolic_xi: bool,
    },
    /// Execute a task file, or a built-in example given its name.
    Run {
        /// Path to a task file, or the name of a built-in example.
        file: String,
    },
    /// List the built-in example documents.
    Examples {
        /// Print the source of one example instead of the listing.
        #[arg(long)]
        show: Option<String>,
    },
}

/// Command line entry point; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args().collect())
}

/// Entry point over explicit arguments, for tests and embedding.
pub fn run_from(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if benign { 0 } else { 2 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn fixture_exit(report: &Report) -> i32 {
    if report.all_pass() {
        0
    } else if report.has_errors() {
        2
    } else {
        1
    }
}

fn hyperbolic_source(n: usize) -> Result<String, WorkbenchError> {
    if n < 2 {
        return Err(WorkbenchError::Precondition(
            "the hyperbolic model needs dimension at least two".into(),
        ));
    }
    let coords: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut out = format!("dimension {n}\ncoordinates {}\n", coords.join(" "));
    for i in 0..n {
        out.push_str(&format!("metric {i} {i} 1/x0^2\n"));
    }
    out.push_str("task check_einstein\n");
    Ok(out)
}

fn sphere_source(n: usize, order: usize) -> Result<String, WorkbenchError> {
    if n < 3 {
        return Err(WorkbenchError::Precondition(
            "the sphere fixture needs bulk dimension at least three".into(),
        ));
    }
    let coords: Vec<String> =
        std::iter::once("rho".to_string()).chain((1..n).map(|i| format!("x{i}"))).collect();
    let sum: Vec<String> = (1..n).map(|i| format!("x{i}^2")).collect();
    let entry = format!("4/(1+{})^2", sum.join("+"));
    let mut out = format!("dimension {n}\ncoordinates {}\n", coords.join(" "));
    for i in 0..n - 1 {
        out.push_str(&format!("boundary_metric {i} {i} {entry}\n"));
    }
    out.push_str(&format!("task fg_expand order={order}\n"));
    Ok(out)
}

fn dispatch(cmd: Command) -> Result<i32, WorkbenchError> {
    match cmd {
        Command::CheckEinstein { dimension } => {
            let doc = parse_task_document(
                &hyperbolic_source(dimension)?,
                &format!("hyperbolic_einstein_n{dimension}"),
            )?;
            let report = run_document(&doc);
            print!("{}", report.to_text(true));
            Ok(fixture_exit(&report))
        }
        Command::FgExpand { order, dimension } => {
            let doc = parse_task_document(
                &sphere_source(dimension, order)?,
                &format!("sphere_expansion_n{dimension}"),
            )?;
            let report = run_document(&doc);
            print!("{}", report.to_text(true));
            Ok(fixture_exit(&report))
        }
        Command::Obstruction { leading } => {
            let task = if leading {
                "task obstruction leading=true expect=zero\n"
            } else {
                "task obstruction expect=zero\n"
            };
            let source = format!(
                "dimension 4\ncoordinates x1 x2 x3 x4\nmetric 0 0 1\nmetric 1 1 1\n\
                 metric 2 2 1\nmetric 3 3 1\n{task}"
            );
            let doc = parse_task_document(&source, "obstruction_flat_n4")?;
            let report = run_document(&doc);
            print!("{}", report.to_text(true));
            Ok(fixture_exit(&report))
        }
        Command::BvpVerify { scalar_constant } => {
            let c = match scalar_constant {
                Some(s) => Some(parse_rational(&s).map_err(WorkbenchError::Precondition)?),
                None => None,
            };
            let rep = bvp::standard_report(c)?;
            println!("scalar curvature constant: {}", rep.scalar_constant);
            for check in &rep.checks {
                println!("{}{}", pass_tag(check.pass), check.name);
            }
            Ok(if rep.all_pass() { 0 } else { 1 })
        }
        Command::AdnCheck { samples, symbolic_xi } => {
            let parsed = match samples {
                Some(s) => Some(parse_sample_list(&s).map_err(WorkbenchError::Precondition)?),
                None => None,
            };
            let rep = crate::adn::standard_report(parsed.as_deref(), symbolic_xi)?;
            for check in &rep.checks {
                println!("{}{}", pass_tag(check.pass), check.name);
                println!("      {}", check.detail);
            }
            Ok(if rep.all_pass() { 0 } else { 1 })
        }
        Command::Run { file } => {
            let path = Path::new(&file);
            let report = if path.exists() {
                run_task_file(path)?
            } else if let Ok(doc) = load_example(&file) {
                run_document(&doc)
            } else {
                return Err(WorkbenchError::Precondition(format!(
                    "'{file}' is neither a file nor a built-in example; known examples: {}",
                    list_examples().join(", ")
                )));
            };
            print!("{}", report.to_text(true));
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Examples { show } => {
            match show {
                Some(name) => print!("{}", example_source(&name)?),
                None => {
                    for (name, source) in EXAMPLES {
                        println!("{name}  {}", example_description(source));
                    }
                }
            }
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_round_trips_through_serialization() {
        for name in list_examples() {
            let doc = load_example(name).unwrap();
            assert_eq!(doc.name, name);
            let text = doc.to_text();
            let reparsed = parse_task_document(&text, "").unwrap();
            assert_eq!(reparsed, doc, "round trip failed for {name}");
        }
    }

    #[test]
    fn example_listing_covers_the_advertised_documents() {
        let names = list_examples();
        assert!(names.len() >= 5);
        for required in [
            "hyperbolic_einstein_n4",
            "hyperbolic_einstein_n6",
            "sphere_conformal_infinity",
            "bach_conformal_hyperbolic",
            "adn_gauge_n4",
            "oblique_failure",
        ] {
            assert!(names.contains(&required), "missing example {required}");
        }
        assert!(matches!(
            load_example("no_such_example"),
            Err(WorkbenchError::Precondition(_))
        ));
    }

    #[test]
    fn unknown_coordinate_is_reported_with_its_name_and_line() {
        let source = "dimension 2\ncoordinates x0 x1\nmetric 0 0 1/y^2\n";
        let err = parse_task_document(source, "t").unwrap_err();
        match err {
            WorkbenchError::TaskFile { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("unknown variable 'y'"), "message: {message}");
            }
            other => panic!("expected a task file error, got {other}"),
        }
    }

    #[test]
    fn duplicate_metric_entries_are_rejected() {
        let source = "dimension 2\ncoordinates x0 x1\nmetric 0 1 x0\nmetric 1 0 x1\n";
        let err = parse_task_document(source, "t").unwrap_err();
        match err {
            WorkbenchError::TaskFile { line, .. } => assert_eq!(line, 4),
            other => panic!("expected a task file error, got {other}"),
        }
    }

    #[test]
    fn symbol_block_errors_point_at_the_block() {
        // boundary weight -3 allows order -1, impossible for a nonzero row
        let source = "dimension 2\ncoordinates x0 x1\nunknown_weights 2\n\
                      interior_weights 0\nboundary_weights -3\n\
                      interior 0 0 xi0^2+xi1^2\nboundary 0 0 xi0\n";
        let err = parse_task_document(source, "t").unwrap_err();
        assert!(matches!(err, WorkbenchError::TaskFile { .. }), "got {err}");
    }

    #[test]
    fn hyperbolic_examples_pass() {
        for name in ["hyperbolic_einstein_n4", "hyperbolic_einstein_n6"] {
            let report = run_document(&load_example(name).unwrap());
            assert!(report.all_pass(), "{name}:\n{}", report.to_text(false));
        }
    }

    #[test]
    fn einstein_check_fails_on_a_non_einstein_metric() {
        let source = "dimension 3\ncoordinates x0 x1 x2\nmetric 0 0 1\nmetric 1 1 1\n\
                      metric 2 2 1\ntask check_einstein\n";
        let doc = parse_task_document(source, "flat").unwrap();
        let report = run_document(&doc);
        assert_eq!(report.tasks[0].status, TaskStatus::Fail);
        // the same metric is Einstein with constant zero
        let source_ok = source.replace("task check_einstein", "task check_einstein constant=0");
        let report_ok = run_document(&parse_task_document(&source_ok, "flat").unwrap());
        assert!(report_ok.all_pass());
    }

    #[test]
    fn conformal_factor_rescales_the_metric() {
        // x0^2 * (delta / x0^2) is flat, hence Einstein with constant zero
        let source = "dimension 3\ncoordinates x0 x1 x2\nmetric 0 0 1/x0^2\n\
                      metric 1 1 1/x0^2\nmetric 2 2 1/x0^2\nconformal_factor x0\n\
                      task check_einstein constant=0\n";
        let report = run_document(&parse_task_document(source, "t").unwrap());
        assert!(report.all_pass(), "{}", report.to_text(false));
    }

    #[test]
    fn sphere_expansion_example_passes_and_reports_coefficients() {
        let report = run_document(&load_example("sphere_conformal_infinity").unwrap());
        assert!(report.all_pass(), "{}", report.to_text(false));
        let text = report.to_text(false);
        assert!(text.contains("g(1): all components zero"));
        assert!(text.contains("g(2): nonzero components"));
    }

    #[test]
    fn fg_expand_task_reports_the_degenerate_order() {
        let doc = load_example("sphere_conformal_infinity").unwrap();
        let mut broken = doc.clone();
        broken.tasks = vec![TaskSpec::FgExpand { order: 3 }];
        let report = run_document(&broken);
        match &report.tasks[0].status {
            TaskStatus::Error(msg) => {
                assert!(msg.contains("order 3"), "message: {msg}");
            }
            other => panic!("expected an error entry, got {other:?}"),
        }
    }

    #[test]
    fn bach_example_passes() {
        let report = run_document(&load_example("bach_conformal_hyperbolic").unwrap());
        assert!(report.all_pass(), "{}", report.to_text(false));
    }

    #[test]
    fn obstruction_example_passes() {
        let report = run_document(&load_example("obstruction_flat_n4").unwrap());
        assert!(report.all_pass(), "{}", report.to_text(false));
    }

    #[test]
    fn boundary_identities_example_passes() {
        let report = run_document(&load_example("boundary_identities").unwrap());
        assert!(report.all_pass(), "{}", report.to_text(false));
    }

    #[test]
    fn adn_gauge_example_passes() {
        let report = run_document(&load_example("adn_gauge_n4").unwrap());
        assert!(report.all_pass(), "{}", report.to_text(false));
    }

    #[test]
    fn oblique_example_detects_the_failure_with_a_certificate() {
        let report = run_document(&load_example("oblique_failure").unwrap());
        assert!(report.all_pass(), "{}", report.to_text(false));
        let text = report.to_text(false);
        assert!(text.contains("kernel certificate"), "{text}");
    }

    #[test]
    fn dimension_mismatch_is_a_per_task_error_and_the_run_continues() {
        let source = "dimension 4\ncoordinates x0 x1 x2 x3\nmetric 0 0 1/x0^2\n\
                      metric 1 1 1/x0^2\nmetric 2 2 1/x0^2\nmetric 3 3 1/x0^2\n\
                      task adn_check dimension=6 samples=(3,4,0)\ntask check_einstein\n";
        let doc = parse_task_document(source, "mixed").unwrap();
        let report = run_document(&doc);
        match &report.tasks[0].status {
            TaskStatus::Error(msg) => {
                assert!(
                    msg.contains("3 components for 5 tangential directions"),
                    "message: {msg}"
                );
            }
            other => panic!("expected an error entry, got {other:?}"),
        }
        assert_eq!(report.tasks[1].status, TaskStatus::Pass);
        assert!(!report.all_pass());
    }

    #[test]
    fn missing_metric_is_a_per_task_error() {
        let source = "dimension 3\ncoordinates x0 x1 x2\ntask check_einstein\n";
        let report = run_document(&parse_task_document(source, "t").unwrap());
        match &report.tasks[0].status {
            TaskStatus::Error(msg) => assert!(msg.contains("no metric"), "message: {msg}"),
            other => panic!("expected an error entry, got {other:?}"),
        }
    }

    #[test]
    fn reports_are_deterministic_without_timing() {
        let doc = load_example("adn_gauge_n4").unwrap();
        let a = run_document(&doc).to_text(false);
        let b = run_document(&doc).to_text(false);
        assert_eq!(a, b);
        assert!(!a.contains("time:"));
        assert!(run_document(&doc).to_text(true).contains("time:"));
    }

    #[test]
    fn task_files_run_from_disk_with_the_stem_as_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("halfspace.task");
        std::fs::write(&path, hyperbolic_source(3).unwrap()).unwrap();
        let report = run_task_file(&path).unwrap();
        assert_eq!(report.document, "halfspace");
        assert!(report.all_pass());

        let missing = run_task_file(&dir.path().join("absent.task"));
        match missing {
            Err(WorkbenchError::TaskFile { line, .. }) => assert_eq!(line, 0),
            other => panic!("expected a task file error, got {other:?}"),
        }
    }

    #[test]
    fn cli_exit_codes_follow_the_contract() {
        let run = |args: &[&str]| {
            let mut full = vec!["fglab".to_string()];
            full.extend(args.iter().map(|s| s.to_string()));
            run_from(full)
        };
        assert_eq!(run(&["examples"]), 0);
        assert_eq!(run(&["examples", "--show", "oblique_failure"]), 0);
        assert_eq!(run(&["examples", "--show", "nonexistent"]), 2);
        assert_eq!(run(&["check-einstein", "--dimension", "3"]), 0);
        assert_eq!(run(&["run", "no_such_file_or_example"]), 2);
        assert_eq!(run(&["bvp-verify", "--scalar-constant", "not_a_number"]), 2);
        assert_eq!(run(&["no-such-subcommand"]), 2);
        assert_eq!(run(&["--help"]), 0);
    }

    #[test]
    fn cli_runs_an_example_by_name() {
        let code = run_from(vec![
            "fglab".to_string(),
            "run".to_string(),
            "hyperbolic_einstein_n4".to_string(),
        ]);
        assert_eq!(code, 0);
    }

    #[test]
    fn sample_lists_parse_and_print_consistently() {
        let parsed = parse_sample_list("(3,4,0);(0,3,4)").unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(sample_list_text(&parsed), "(3,4,0);(0,3,4)");
        let bare = parse_sample_list("1/2,-1").unwrap();
        assert_eq!(bare[0].len(), 2);
        assert!(parse_sample_list("(3,4,x)").is_err());
        assert!(parse_sample_list("()").is_err());
    }

    #[test]
    fn task_lines_reject_unknown_names_and_parameters() {
        let bad_name = "dimension 2\ncoordinates x0 x1\ntask warp\n";
        assert!(matches!(
            parse_task_document(bad_name, "t"),
            Err(WorkbenchError::TaskFile { line: 3, .. })
        ));
        let bad_param = "dimension 2\ncoordinates x0 x1\ntask check_einstein speed=9\n";
        assert!(matches!(
            parse_task_document(bad_param, "t"),
            Err(WorkbenchError::TaskFile { line: 3, .. })
        ));
    }
}
