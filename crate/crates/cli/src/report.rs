//! Report rows, their pass rules, and the three output renderings.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// A real or complex reported number; complex values serialize as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex([f64; 2]),
}

impl Value {
    fn as_complex(self) -> Complex64 {
        match self {
            Value::Real(x) => Complex64::new(x, 0.0),
            Value::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    fn display(self) -> String {
        self.render(number)
    }

    fn exact(self) -> String {
        self.render(round_trip)
    }

    fn render(self, f: fn(f64) -> String) -> String {
        match self {
            Value::Real(x) => f(x),
            Value::Complex([re, im]) => format!("{}{}{}i", f(re), if im < 0.0 { "-" } else { "+" }, f(im.abs())),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<Complex64> for Value {
    fn from(z: Complex64) -> Self {
        Value::Complex([z.re, z.im])
    }
}

fn number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x:.10}").trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.6e}")
    }
}

/// Shortest scientific form that parses back to the same `f64`.
fn round_trip(x: f64) -> String {
    format!("{x:e}")
}

/// How a row's `bound` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TolKind {
    /// `rel_diff <= bound`
    Relative,
    /// `abs_diff <= bound`
    Absolute,
    /// `abs_diff <= bound * err` (Monte-Carlo standard errors)
    Sigma,
    /// `abs_diff <= bound`, where `bound` is a certified truncation bound
    Certified,
    /// `rel_diff <= bound` and `abs_diff <= err`
    RelativeWithinErr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub kind: TolKind,
    pub bound: f64,
}

impl Tolerance {
    pub fn relative(bound: f64) -> Self {
        Self { kind: TolKind::Relative, bound }
    }
    pub fn absolute(bound: f64) -> Self {
        Self { kind: TolKind::Absolute, bound }
    }
    pub fn sigma(bound: f64) -> Self {
        Self { kind: TolKind::Sigma, bound }
    }
    pub fn certified(bound: f64) -> Self {
        Self { kind: TolKind::Certified, bound }
    }
    pub fn relative_within_err(bound: f64) -> Self {
        Self { kind: TolKind::RelativeWithinErr, bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Acceptance criterion number, set by `suite`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    pub quantity: String,
    pub method: String,
    pub value: Value,
    pub err: Option<f64>,
    pub reference: String,
    pub reference_value: Value,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    pub tolerance: Tolerance,
    pub pass: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Row {
    /// Builds a row and decides `pass` from the tolerance.
    pub fn new(
        quantity: impl Into<String>,
        method: impl Into<String>,
        value: impl Into<Value>,
        err: Option<f64>,
        reference: impl Into<String>,
        reference_value: impl Into<Value>,
        tolerance: Tolerance,
    ) -> Self {
        let value = value.into();
        let reference_value = reference_value.into();
        let v = value.as_complex();
        let r = reference_value.as_complex();
        let abs = (v - r).norm();
        let rel = if r.norm() > 0.0 { abs / r.norm() } else if abs == 0.0 { 0.0 } else { f64::INFINITY };
        let e = err.unwrap_or(0.0);
        let pass = match tolerance.kind {
            TolKind::Relative => rel <= tolerance.bound,
            TolKind::Absolute | TolKind::Certified => abs <= tolerance.bound,
            // a zero-variance estimator may still differ from the reference by rounding
            TolKind::Sigma => abs <= tolerance.bound * e + 4.0 * f64::EPSILON * r.norm(),
            TolKind::RelativeWithinErr => rel <= tolerance.bound && abs <= e,
        };
        Row {
            criterion: None,
            quantity: quantity.into(),
            method: method.into(),
            value,
            err: err.and_then(finite),
            reference: reference.into(),
            reference_value,
            abs_diff: finite(abs),
            rel_diff: finite(rel),
            tolerance,
            pass: pass && v.re.is_finite() && v.im.is_finite(),
        }
    }

    /// A residual that must stay below `bound`; the reference is zero.
    pub fn residual(quantity: impl Into<String>, method: impl Into<String>, value: f64, reference: impl Into<String>, bound: f64) -> Self {
        Row::new(quantity, method, value, None, reference, 0.0, Tolerance::absolute(bound))
    }

    pub fn with_criterion(mut self, criterion: u8) -> Self {
        self.criterion = Some(criterion);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub inputs: serde_json::Value,
    pub rows: Vec<Row>,
    /// Only filled with `--timing`, so that reports stay byte-reproducible by default.
    pub wall_time_ms: Option<u64>,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// Exit status when every row passes.
pub const EXIT_OK: i32 = 0;
/// Exit status for rejected input or a library error.
pub const EXIT_REJECTED: i32 = 2;
/// Exit status when some row misses its tolerance.
pub const EXIT_FAILED: i32 = 3;

impl RunReport {
    pub fn new(command: &str, inputs: serde_json::Value, seed: u64) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            rows: Vec::new(),
            wall_time_ms: None,
            seed,
            notes: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "criterion", "quantity", "method", "value", "err", "reference", "reference_value", "abs_diff", "rel_diff",
            "tol_kind", "tol_bound", "pass",
        ])
        .expect("in-memory write");
        let opt = |x: Option<f64>| x.map(round_trip).unwrap_or_default();
        for r in &self.rows {
            let kind = serde_json::to_value(r.tolerance.kind).expect("enum serializes");
            w.write_record([
                r.criterion.map(|c| c.to_string()).unwrap_or_default(),
                r.quantity.clone(),
                r.method.clone(),
                r.value.exact(),
                opt(r.err),
                r.reference.clone(),
                r.reference_value.exact(),
                opt(r.abs_diff),
                opt(r.rel_diff),
                kind.as_str().unwrap_or_default().to_string(),
                round_trip(r.tolerance.bound),
                r.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_table(&self) -> String {
        let header = ["quantity", "method", "value", "reference", "ref value", "abs diff", "tolerance", "pass"];
        let mut cells: Vec<[String; 8]> = vec![header.map(String::from)];
        for r in &self.rows {
            let quantity = match r.criterion {
                Some(c) => format!("[{c}] {}", r.quantity),
                None => r.quantity.clone(),
            };
            let kind = serde_json::to_value(r.tolerance.kind).expect("enum serializes");
            cells.push([
                quantity,
                r.method.clone(),
                r.value.display(),
                r.reference.clone(),
                r.reference_value.display(),
                r.abs_diff.map(number).unwrap_or_else(|| "inf".into()),
                format!("{} {}", kind.as_str().unwrap_or_default(), number(r.tolerance.bound)),
                if r.pass { "ok".into() } else { "FAIL".into() },
            ]);
        }
        let widths: Vec<usize> = (0..8).map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        for (i, row) in cells.iter().enumerate() {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "  {}", line.join("  ").trim_end());
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                let _ = writeln!(out, "  {}", rule.join("  "));
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(out, "wall time: {ms} ms");
        }
        let passed = self.rows.iter().filter(|r| r.pass).count();
        let _ = writeln!(out, "{passed}/{} rows pass", self.rows.len());
        out
    }
}
