//! Line-oriented corpus files and the batch runner.
//!
//! One record per line, `|`-separated:
//!
//! ```text
//! id | equation | name=val,... | expected_verdict | inv:name=value@tol,... | box=x0,x1,y0,y1
//! ```
//!
//! Trailing fields may be omitted and any field may be empty. `#` starts a
//! comment. Assertion values are constant expressions (`18/5`,
//! `(729/4)^(1/5)`); the tolerance is absolute, or relative with an `r`
//! suffix (`@1e-6r`). Assertion names are looked up among the invariants,
//! then the extracted parameters, then the relation residuals, then the
//! vanishing flags (which read as `0` when they hold).

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::classify::{classify_with, Classification, Verdict, DEFAULT_TOL};
use crate::expr::{parse, snap_rational, Bindings, Expr, Probe, ProbeError, Rational, SampleBox, Var};
use crate::ode::{normalize_to_cubic, NormalizeError, OdeCubic};
use crate::report::{CheckRow, RecordReport, Report, Status};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub relative: bool,
}

impl Assertion {
    pub fn holds(&self, got: f64) -> bool {
        let allowed = if self.relative {
            self.tol * self.value.abs()
        } else {
            self.tol
        };
        (got - self.value).abs() <= allowed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRecord {
    pub id: String,
    pub line: usize,
    pub equation: String,
    pub params: BTreeMap<String, Rational>,
    pub sample_box: Option<SampleBox>,
    pub expected: Option<Verdict>,
    pub assertions: Vec<Assertion>,
}

/// A parsed corpus: good records plus the lines that failed to parse.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub records: Vec<CorpusRecord>,
    pub errors: Vec<RecordError>,
}

/// Exact rational from `3`, `-5/3`, or a decimal (snapped, max denominator 10⁶).
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not a rational number");
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(Rational::from_integer(n));
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    snap_rational(v, 1_000_000).ok_or_else(|| format!("`{s}` has no rational form with denominator ≤ 10^6"))
}

/// `name=value` with a rational value.
pub fn parse_binding(s: &str) -> Result<(String, Rational), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let name = name.trim();
    let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(format!("bad parameter name `{name}`"));
    }
    Ok((name.to_string(), parse_rational(value)?))
}

fn constant(s: &str) -> Result<f64, String> {
    let e = parse(s).map_err(|e| format!("`{s}`: {e}"))?;
    let free = Var::ALL.iter().any(|&v| e.contains_var(v)) || !e.params().is_empty();
    e.evaluate(0.0, 0.0, &Bindings::new())
        .ok()
        .filter(|v| !free && v.is_finite())
        .ok_or_else(|| format!("`{s}` is not a finite constant"))
}

fn parse_assertion(s: &str) -> Result<Assertion, String> {
    let (lhs, tol) = s.rsplit_once('@').ok_or_else(|| format!("missing @tol in `{s}`"))?;
    let (name, value) = lhs
        .split_once('=')
        .ok_or_else(|| format!("expected name=value@tol, got `{s}`"))?;
    let tol = tol.trim();
    let (tol, relative) = match tol.strip_suffix('r') {
        Some(t) => (t, true),
        None => (tol, false),
    };
    let tol: f64 = tol.parse().map_err(|_| format!("bad tolerance in `{s}`"))?;
    if tol.is_nan() || tol < 0.0 {
        return Err(format!("bad tolerance in `{s}`"));
    }
    Ok(Assertion {
        name: name.trim().to_string(),
        value: constant(value)?,
        tol,
        relative,
    })
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn parse_line(line: usize, text: &str) -> Result<CorpusRecord, String> {
    let fields: Vec<&str> = text.split('|').map(str::trim).collect();
    if fields.len() < 2 || fields.len() > 6 {
        return Err(format!("expected 2 to 6 fields, found {}", fields.len()));
    }
    let field = |i: usize| fields.get(i).copied().unwrap_or("");
    let id = field(0);
    if id.is_empty() {
        return Err("empty id".into());
    }
    let equation = field(1);
    if equation.is_empty() {
        return Err("empty equation".into());
    }
    let params = split_list(field(2))
        .into_iter()
        .map(parse_binding)
        .collect::<Result<_, _>>()?;
    let expected = match field(3) {
        "" => None,
        v => Some(v.parse()?),
    };
    let assertions = match field(4) {
        "" => Vec::new(),
        v => {
            let list = v.strip_prefix("inv:").ok_or("assertion field must start with `inv:`")?;
            split_list(list)
                .into_iter()
                .map(parse_assertion)
                .collect::<Result<_, _>>()?
        }
    };
    let sample_box = match field(5) {
        "" => None,
        v => Some(
            v.strip_prefix("box=")
                .ok_or("box field must start with `box=`")?
                .parse()?,
        ),
    };
    Ok(CorpusRecord {
        id: id.to_string(),
        line,
        equation: equation.to_string(),
        params,
        sample_box,
        expected,
        assertions,
    })
}

/// Parses a corpus file. Bad lines are collected, not fatal.
pub fn parse_corpus(text: &str) -> Corpus {
    let mut out = Corpus::default();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match parse_line(line, body) {
            Ok(rec) if !seen.insert(rec.id.clone()) => out.errors.push(RecordError::DuplicateId { line, id: rec.id }),
            Ok(rec) => out.records.push(rec),
            Err(message) => out.errors.push(RecordError::Syntax { line, message }),
        }
    }
    out
}

/// FNV-1a over the base seed and the record id.
pub fn record_seed(seed: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(id.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub sample_box: SampleBox,
    pub tol: f64,
    /// Record wall times and a timestamp.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions {
            seed: 0,
            sample_box: SampleBox::default(),
            tol: DEFAULT_TOL,
            timing: true,
        }
    }
}

/// Why a single equation could not be classified.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("normalize: {0}")]
    Normalize(NormalizeError),
    #[error("classify: {0}")]
    Probe(ProbeError),
}

impl RunError {
    pub fn status(&self) -> Status {
        match self {
            RunError::Normalize(NormalizeError::Probe(_)) | RunError::Probe(_) => Status::ProbeExhausted,
            RunError::Normalize(_) => Status::InputError,
        }
    }
}

/// Normalizes and classifies one equation.
pub fn classify_equation(
    equation: &str,
    params: &BTreeMap<String, Rational>,
    probe: &Probe,
    tol: f64,
) -> Result<(OdeCubic, Classification), RunError> {
    let bindings: Bindings = params.iter().map(|(k, v)| (k.clone(), *v)).collect();
    let ode = normalize_to_cubic(equation, &bindings, probe).map_err(RunError::Normalize)?;
    let c = classify_with(&ode, probe, tol).map_err(RunError::Probe)?;
    Ok((ode, c))
}

fn lookup(c: &Classification, name: &str) -> Option<f64> {
    c.invariant(name)
        .or_else(|| c.param(name))
        .or_else(|| c.relations.get(name).copied())
        .or_else(|| c.vanishing.get(name).map(|&z| if z { 0.0 } else { f64::NAN }))
}

/// Runs one record with the given probe seed.
pub fn run_record(rec: &CorpusRecord, seed: u64, opts: &RunOptions) -> RecordReport {
    let start = Instant::now();
    let probe = Probe {
        seed,
        sample_box: rec.sample_box.unwrap_or(opts.sample_box),
        ..Probe::default()
    };
    let mut report = RecordReport::new(&rec.id, &rec.equation, &rec.params, seed, probe.sample_box);
    report.expected = rec.expected;
    match classify_equation(&rec.equation, &rec.params, &probe, opts.tol) {
        Ok((ode, c)) => {
            for a in &rec.assertions {
                let got = lookup(&c, &a.name);
                report.checks.push(CheckRow {
                    name: a.name.clone(),
                    expected: a.value,
                    tol: a.tol,
                    relative: a.relative,
                    got,
                    pass: got.is_some_and(|g| a.holds(g)),
                });
            }
            report.fill(&ode, &c);
        }
        Err(e) => report.fail(e.status(), e.to_string()),
    }
    report.finish();
    if opts.timing {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    report
}

/// Runs every record concurrently; output order follows the file.
pub fn run_corpus(corpus: &Corpus, opts: &RunOptions) -> Report {
    let mut records: Vec<RecordReport> = corpus
        .records
        .par_iter()
        .map(|rec| run_record(rec, record_seed(opts.seed, &rec.id), opts))
        .collect();
    for e in &corpus.errors {
        let line = match e {
            RecordError::Syntax { line, .. } | RecordError::DuplicateId { line, .. } => *line,
        };
        let mut r = RecordReport::new(&format!("line {line}"), "", &BTreeMap::new(), 0, opts.sample_box);
        r.fail(Status::InputError, e.to_string());
        r.finish();
        records.push(r);
    }
    Report::new(opts, records)
}

/// Builds an expression for a bound parameter map, for display.
pub fn params_display(params: &BTreeMap<String, Rational>) -> BTreeMap<String, String> {
    params
        .iter()
        .map(|(k, v)| (k.clone(), Expr::constant(*v).to_string()))
        .collect()
}
