//! Serializable reports (JSON, see `schema/report.schema.json`) and their
//! plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::classify::{Classification, Verdict};
use crate::corpus::{params_display, RunOptions};
use crate::expr::{snap_rational_tol, Derivatives, Expr, Probe, ProbeError, Rational, SampleBox};
use crate::invariants::{Branch, InvariantEngine, InvariantError};
use crate::ode::OdeCubic;

/// Largest printed expression kept in a report.
pub const EXPR_LIMIT: u64 = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    InputError,
    ProbeExhausted,
}

/// A probed value with its rational reading, if it has a short one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueRow {
    pub name: String,
    pub value: Option<f64>,
    pub rational: Option<String>,
}

impl ValueRow {
    pub fn new(name: &str, value: Option<f64>) -> ValueRow {
        ValueRow {
            name: name.to_string(),
            value,
            rational: value.and_then(rational_text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub expected: f64,
    pub tol: f64,
    pub relative: bool,
    pub got: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordReport {
    pub id: String,
    pub equation: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub sample_box: SampleBox,
    pub status: Status,
    pub error: Option<String>,
    pub normalized: Option<String>,
    pub verdict: Option<Verdict>,
    pub algebra_dim: Option<u8>,
    pub branch: Option<Branch>,
    pub branch_notes: Vec<String>,
    pub vanishing: BTreeMap<String, bool>,
    pub invariants: Vec<ValueRow>,
    pub params_extracted: Vec<ValueRow>,
    pub relations: BTreeMap<String, f64>,
    pub model: Option<String>,
    pub model_box: Option<SampleBox>,
    pub generators: Vec<[String; 2]>,
    pub expected: Option<Verdict>,
    pub checks: Vec<CheckRow>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RecordReport {
    pub fn new(
        id: &str,
        equation: &str,
        params: &BTreeMap<String, Rational>,
        seed: u64,
        sample_box: SampleBox,
    ) -> RecordReport {
        RecordReport {
            id: id.to_string(),
            equation: equation.to_string(),
            params: params_display(params),
            seed,
            sample_box,
            status: Status::Ok,
            error: None,
            normalized: None,
            verdict: None,
            algebra_dim: None,
            branch: None,
            branch_notes: Vec::new(),
            vanishing: BTreeMap::new(),
            invariants: Vec::new(),
            params_extracted: Vec::new(),
            relations: BTreeMap::new(),
            model: None,
            model_box: None,
            generators: Vec::new(),
            expected: None,
            checks: Vec::new(),
            pass: false,
            wall_time_ms: None,
        }
    }

    pub fn fill(&mut self, ode: &OdeCubic, c: &Classification) {
        self.normalized = Some(ode.to_string());
        self.verdict = Some(c.verdict);
        self.algebra_dim = c.algebra_dim;
        self.branch = c.branch;
        self.branch_notes = c.branch_notes.clone();
        self.vanishing = c.vanishing.clone();
        self.invariants = c.invariants.iter().map(|i| ValueRow::new(&i.name, i.value)).collect();
        self.params_extracted = c.params.iter().map(|(k, v)| ValueRow::new(k, Some(*v))).collect();
        self.relations = c.relations.clone();
        self.model = c.model.as_ref().map(|m| m.to_string());
        self.model_box = c.model_box;
        self.generators = c
            .generators
            .iter()
            .map(|(xi, eta)| [xi.to_string(), eta.to_string()])
            .collect();
    }

    pub fn fail(&mut self, status: Status, message: String) {
        self.status = status;
        self.error = Some(message);
    }

    /// Settles `pass` from status, expected verdict and checks.
    pub fn finish(&mut self) {
        self.pass = self.status == Status::Ok
            && self.expected.is_none_or(|e| Some(e) == self.verdict)
            && self.checks.iter().all(|c| c.pass);
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = self.verdict.map_or_else(|| "-".to_string(), |v| v.to_string());
        let _ = write!(s, "{}: {}", self.id, verdict);
        if let Some(d) = self.algebra_dim {
            let _ = write!(s, " (algebra dim {d})");
        }
        if let Some(e) = self.expected {
            let _ = write!(s, " [expected {e}: {}]", if self.pass { "PASS" } else { "FAIL" });
        } else if !self.pass {
            s.push_str(" [FAIL]");
        }
        s.push('\n');
        let mut kv: Vec<(String, String)> = Vec::new();
        if !self.equation.is_empty() {
            kv.push(("equation".into(), self.equation.clone()));
        }
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            kv.push(("params".into(), p.join(", ")));
        }
        if let Some(e) = &self.error {
            kv.push(("error".into(), e.clone()));
        }
        if let Some(b) = self.branch {
            kv.push(("branch".into(), b.to_string()));
        }
        let zeros: Vec<String> = self
            .vanishing
            .iter()
            .map(|(k, z)| format!("{k}{}", if *z { "≡0" } else { "≢0" }))
            .collect();
        if !zeros.is_empty() {
            kv.push(("vanishing".into(), zeros.join(" ")));
        }
        for row in self.invariants.iter().chain(&self.params_extracted) {
            kv.push((row.name.clone(), format_value(row)));
        }
        for (k, v) in &self.relations {
            kv.push((k.clone(), format!("{v:e}")));
        }
        if let Some(m) = &self.model {
            kv.push(("model".into(), m.clone()));
        }
        for (i, [xi, eta]) in self.generators.iter().enumerate() {
            kv.push((format!("X{}", i + 1), format!("({xi}) d/dx + ({eta}) d/dy")));
        }
        for c in &self.checks {
            let got = c.got.map_or_else(|| "-".to_string(), |g| g.to_string());
            let tol = if c.relative {
                format!("{}r", c.tol)
            } else {
                c.tol.to_string()
            };
            let mark = if c.pass { "ok" } else { "FAIL" };
            kv.push((
                format!("check {}", c.name),
                format!("{got} vs {}@{tol} {mark}", c.expected),
            ));
        }
        for n in &self.branch_notes {
            kv.push(("note".into(), n.clone()));
        }
        if let Some(t) = self.wall_time_ms {
            kv.push(("time".into(), format!("{t:.1} ms")));
        }
        let width = kv.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in kv {
            let _ = writeln!(s, "  {k:<width$}  {v}");
        }
        s
    }
}

fn format_value(row: &ValueRow) -> String {
    match (row.value, &row.rational) {
        (None, _) => "not constant".to_string(),
        (Some(v), Some(r)) if r.contains('/') || r.parse::<f64>().ok() != Some(v) => format!("{v} ({r})"),
        (Some(v), _) => v.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub summary: Summary,
    pub records: Vec<RecordReport>,
}

impl Report {
    pub fn new(opts: &RunOptions, records: Vec<RecordReport>) -> Report {
        let passed = records.iter().filter(|r| r.pass).count();
        let timestamp = opts.timing.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Report {
            tool: "cubic-ode".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: opts.seed,
            tol: opts.tol,
            timestamp,
            summary: Summary {
                total: records.len(),
                passed,
                failed: records.len() - passed,
            },
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.to_text());
            s.push('\n');
        }
        if self.records.len() > 1 {
            s.push_str(&self.summary_table());
        }
        let _ = writeln!(
            s,
            "{} records: {} passed, {} failed",
            self.summary.total, self.summary.passed, self.summary.failed
        );
        s
    }

    fn summary_table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .records
            .iter()
            .map(|r| {
                let show = |v: Option<Verdict>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
                [
                    r.id.clone(),
                    show(r.verdict),
                    show(r.expected),
                    if r.pass { "PASS" } else { "FAIL" }.to_string(),
                ]
            })
            .collect();
        let head = ["id", "verdict", "expected", "result"].map(String::from);
        let mut w = head.each_ref().map(|h| h.chars().count());
        for row in &rows {
            for (wi, cell) in w.iter_mut().zip(row) {
                *wi = (*wi).max(cell.chars().count());
            }
        }
        let mut s = String::new();
        for row in std::iter::once(&head).chain(&rows) {
            let _ = writeln!(
                s,
                "{:<a$}  {:<b$}  {:<c$}  {}",
                row[0],
                row[1],
                row[2],
                row[3],
                a = w[0],
                b = w[1],
                c = w[2]
            );
        }
        s
    }
}

/// Snapped rational text for a value, as used in reports.
pub fn rational_text(v: f64) -> Option<String> {
    snap_rational_tol(v, 1_000, 1e-9).map(|r| r.to_string())
}

/// One invariant in an [`InvariantDump`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExprRow {
    pub name: String,
    /// `None` when the printed form exceeds [`EXPR_LIMIT`] characters.
    pub expr: Option<String>,
    /// False when no sample point lies in the expression's domain.
    pub evaluable: bool,
    pub zero: bool,
    pub value: Option<f64>,
    pub rational: Option<String>,
}

/// Every invariant the classifier would look at, without a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantDump {
    pub equation: String,
    pub normalized: String,
    pub relative: Vec<ExprRow>,
    pub branch: Option<Branch>,
    pub branch_notes: Vec<String>,
    pub pseudo: Vec<ExprRow>,
    pub general: Vec<ExprRow>,
    pub notes: Vec<String>,
}

fn expr_row(name: &str, e: &Expr, probe: &Probe, d: &Derivatives) -> Result<ExprRow, ProbeError> {
    let mut row = ExprRow {
        name: name.to_string(),
        expr: e.to_string_capped(EXPR_LIMIT),
        evaluable: true,
        zero: false,
        value: None,
        rational: None,
    };
    let probed = probe.is_identically_zero(e).and_then(|zero| {
        Ok((
            zero,
            if zero {
                Some(0.0)
            } else {
                probe.constant_value_with(e, d)?
            },
        ))
    });
    match probed {
        Ok((zero, value)) => {
            row.zero = zero;
            row.value = value;
            row.rational = value.and_then(rational_text);
        }
        Err(ProbeError::Exhausted { .. }) => row.evaluable = false,
        Err(e) => return Err(e),
    }
    Ok(row)
}

pub fn dump_invariants(equation: &str, ode: &OdeCubic, probe: &Probe) -> Result<InvariantDump, ProbeError> {
    let eng = InvariantEngine::new(ode);
    let d = eng.derivatives();
    let mut out = InvariantDump {
        equation: equation.to_string(),
        normalized: ode.to_string(),
        relative: Vec::new(),
        branch: None,
        branch_notes: Vec::new(),
        pseudo: Vec::new(),
        general: Vec::new(),
        notes: Vec::new(),
    };
    for (name, e) in eng.relative().items() {
        out.relative.push(expr_row(name, e, probe, d)?);
    }
    let zero = |name: &str| out.relative.iter().any(|r| r.name == name && r.zero);
    if zero("A") && zero("B") {
        out.notes
            .push("Maximal Degeneration: A and B vanish, the equation is linearizable".into());
        return Ok(out);
    }
    if !zero("F5") {
        out.notes.push("General Case: F does not vanish".into());
        for (name, e) in eng.general_invariants() {
            out.general.push(expr_row(name, &e, probe, d)?);
        }
        return Ok(out);
    }
    out.notes
        .push("Intermediate Degeneration: F vanishes, A or B does not".into());
    let sel = match eng.select(probe) {
        Ok(sel) => sel,
        Err(InvariantError::Probe(e)) => return Err(e),
        Err(InvariantError::BothDegenerate) => unreachable!("A and B checked above"),
    };
    out.branch = Some(sel.bundle.branch);
    out.branch_notes = sel.notes;
    let b = &sel.bundle;
    let pairs = [
        ("phi", &b.phi),
        ("omega", &b.omega),
        ("gamma", &b.gamma),
        ("theta", &b.theta),
    ];
    let mut rows: Vec<(String, &Expr)> = vec![
        ("N".into(), &b.n),
        ("M".into(), &b.m),
        ("Omega".into(), &b.omega_cap),
        ("Lambda".into(), &b.lambda),
        ("K".into(), &b.k),
        ("L".into(), &b.l),
        ("Gamma".into(), &b.gamma_cap),
        ("Theta".into(), &b.theta_cap),
    ];
    for (name, (e1, e2)) in pairs {
        rows.push((format!("{name}1"), e1));
        rows.push((format!("{name}2"), e2));
    }
    for (name, e) in rows {
        out.pseudo.push(expr_row(&name, e, probe, d)?);
    }
    for (name, e) in b.first_case() {
        out.pseudo.push(expr_row(name, &e, probe, d)?);
    }
    Ok(out)
}

impl InvariantDump {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "equation    {}", self.equation);
        let _ = writeln!(s, "normalized  {}", self.normalized);
        if let Some(b) = self.branch {
            let _ = writeln!(s, "branch      {b}");
        }
        for n in self.notes.iter().chain(&self.branch_notes) {
            let _ = writeln!(s, "note        {n}");
        }
        for (title, rows) in [
            ("relative", &self.relative),
            ("pseudo", &self.pseudo),
            ("general", &self.general),
        ] {
            if rows.is_empty() {
                continue;
            }
            let _ = writeln!(s, "\n{title}:");
            let width = rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
            for r in rows {
                let value = if !r.evaluable {
                    "not evaluable".to_string()
                } else if r.zero {
                    "≡ 0".to_string()
                } else {
                    format_value(&ValueRow {
                        name: r.name.clone(),
                        value: r.value,
                        rational: r.rational.clone(),
                    })
                };
                let expr = r.expr.as_deref().unwrap_or("(too large to print)");
                let _ = writeln!(s, "  {:<width$}  {value}\n  {:<width$}  = {expr}", r.name, "");
            }
        }
        s
    }
}
