//! Report model and its JSON, CSV and text renderings.
//!
//! CSV columns, in order: `suite, extension, check, p, precision, t, m,
//! trials, passes, failures, skipped, status`. One row per check.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 12] =
    ["suite", "extension", "check", "p", "precision", "t", "m", "trials", "passes", "failures", "skipped", "status"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational; never affects the exit code.
    Info,
    /// The suite could not complete; counts as a failure.
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::Error => "error",
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Error)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub trials: u64,
    pub passes: u64,
    pub failures: u64,
    pub skipped: u64,
    pub status: Status,
}

impl CheckRecord {
    pub fn single(name: impl Into<String>, ok: bool) -> Self {
        CheckRecord {
            name: name.into(),
            trials: 1,
            passes: ok as u64,
            failures: !ok as u64,
            skipped: 0,
            status: if ok { Status::Pass } else { Status::Fail },
        }
    }

    pub fn tally(name: impl Into<String>, t: &wittcheck_core::cohomology::Tally) -> Self {
        CheckRecord {
            name: name.into(),
            trials: t.trials,
            passes: t.passes,
            failures: t.failures,
            skipped: t.skipped,
            status: if t.ok() { Status::Pass } else { Status::Fail },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleRecord {
    pub trial: u64,
    pub check: String,
    /// Balanced coordinates of each Witt component.
    pub vector: Vec<Vec<i64>>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteRecord {
    pub suite: String,
    pub extension: String,
    pub p: u64,
    pub precision: u32,
    pub t: u64,
    pub m: usize,
    pub status: Status,
    pub trials: u64,
    pub passes: u64,
    pub failures: u64,
    pub skipped: u64,
    pub checks: Vec<CheckRecord>,
    pub counterexamples: Vec<CounterexampleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<i64>>>,
    pub digests: BTreeMap<String, String>,
    pub details: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl SuiteRecord {
    pub fn new(suite: &str, extension: &str, p: u64, precision: u32, t: u64, m: usize) -> Self {
        SuiteRecord {
            suite: suite.into(),
            extension: extension.into(),
            p,
            precision,
            t,
            m,
            status: Status::Pass,
            trials: 0,
            passes: 0,
            failures: 0,
            skipped: 0,
            checks: vec![],
            counterexamples: vec![],
            witness: None,
            digests: BTreeMap::new(),
            details: BTreeMap::new(),
            message: None,
            timing_ms: None,
        }
    }

    /// Totals and status from the checks; an explicit `Info` or `Error`
    /// status is kept.
    pub fn finish(&mut self) {
        self.trials = self.checks.iter().map(|c| c.trials).sum();
        self.passes = self.checks.iter().map(|c| c.passes).sum();
        self.failures = self.checks.iter().map(|c| c.failures).sum();
        self.skipped = self.checks.iter().map(|c| c.skipped).sum();
        if matches!(self.status, Status::Pass | Status::Fail) {
            self.status = if self.checks.iter().any(|c| c.status.is_failure()) { Status::Fail } else { Status::Pass };
        }
    }

    pub fn error(mut self, message: impl Into<String>) -> Self {
        self.status = Status::Error;
        self.message = Some(message.into());
        self
    }

    pub fn detail(&mut self, key: &str, value: impl ToString) {
        self.details.insert(key.into(), value.to_string());
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub extension: String,
    pub p: Option<u64>,
    pub precision: Option<u32>,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub suites: Vec<String>,
    pub format: String,
    pub max_terms: u128,
    pub timings: bool,
}

impl ConfigEcho {
    pub fn of(config: &RunConfig, p: Option<u64>, precision: Option<u32>) -> Self {
        ConfigEcho {
            extension: config.extension.to_string(),
            p,
            precision,
            m: config.m,
            trials: config.trials,
            seed: config.seed,
            suites: config.sorted_suites().iter().map(|s| s.name().to_string()).collect(),
            format: config.format.name().into(),
            max_terms: config.limits.max_terms,
            timings: config.timings,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub version: u32,
    pub config: ConfigEcho,
    pub suites: Vec<SuiteRecord>,
}

impl Report {
    pub fn new(config: ConfigEcho) -> Self {
        Report { version: SCHEMA_VERSION, config, suites: vec![] }
    }

    pub fn passed(&self) -> bool {
        !self.suites.iter().any(|s| s.status.is_failure())
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => emit_csv(report),
        Format::Text => emit_text(report).into_bytes(),
    }
}

fn emit_csv(report: &Report) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for s in &report.suites {
        let mut rows: Vec<(String, u64, u64, u64, u64, Status)> =
            s.checks.iter().map(|c| (c.name.clone(), c.trials, c.passes, c.failures, c.skipped, c.status)).collect();
        if rows.is_empty() {
            rows.push(("-".into(), s.trials, s.passes, s.failures, s.skipped, s.status));
        }
        for (check, trials, passes, failures, skipped, status) in rows {
            w.write_record([
                s.suite.clone(),
                s.extension.clone(),
                check,
                s.p.to_string(),
                s.precision.to_string(),
                s.t.to_string(),
                s.m.to_string(),
                trials.to_string(),
                passes.to_string(),
                failures.to_string(),
                skipped.to_string(),
                status.name().to_string(),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(out, "wittcheck report (schema {})", report.version);
    let _ = writeln!(
        out,
        "extension {}  m {}  trials {}  seed {}  suites {}",
        c.extension,
        c.m,
        c.trials,
        c.seed,
        c.suites.join(",")
    );
    for s in &report.suites {
        let _ = writeln!(out);
        let _ = write!(
            out,
            "[{}] {}  {}  p={} N={} t={} m={}",
            s.status.name(),
            s.suite,
            s.extension,
            s.p,
            s.precision,
            s.t,
            s.m
        );
        if let Some(ms) = s.timing_ms {
            let _ = write!(out, "  {ms} ms");
        }
        let _ = writeln!(out);
        if let Some(msg) = &s.message {
            let _ = writeln!(out, "  {msg}");
        }
        let width = s.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
        if !s.checks.is_empty() {
            let _ = writeln!(
                out,
                "  {:<width$}  {:>6}  {:>8}  {:>8}  {:>7}  status",
                "check", "trials", "passes", "failures", "skipped"
            );
        }
        for ch in &s.checks {
            let _ = writeln!(
                out,
                "  {:<width$}  {:>6}  {:>8}  {:>8}  {:>7}  {}",
                ch.name,
                ch.trials,
                ch.passes,
                ch.failures,
                ch.skipped,
                ch.status.name()
            );
        }
        for (k, v) in &s.details {
            let _ = writeln!(out, "  {k}: {v}");
        }
        if let Some(w) = &s.witness {
            let _ = writeln!(out, "  witness coordinates: {w:?}");
        }
        for (k, v) in &s.digests {
            let _ = writeln!(out, "  sha256 {k}: {v}");
        }
        for ce in &s.counterexamples {
            let _ =
                writeln!(out, "  counterexample (trial {}, {}): {:?}  {}", ce.trial, ce.check, ce.vector, ce.detail);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_json() {
        let r = Report::new(ConfigEcho::of(&RunConfig::default(), None, None));
        let v: serde_json::Value = serde_json::from_slice(&emit_report(&r, Format::Json)).unwrap();
        assert_eq!(v["suites"], serde_json::json!([]));
        assert_eq!(v["version"], 1);
        assert!(v["config"].is_object());
    }

    #[test]
    fn csv_header_and_rows() {
        let mut r = Report::new(ConfigEcho::of(&RunConfig::default(), None, None));
        let mut s = SuiteRecord::new("h1", "quadratic-sqrt2", 2, 32, 2, 1);
        s.checks.push(CheckRecord::single("stable", true));
        s.finish();
        r.suites.push(s);
        let text = String::from_utf8(emit_report(&r, Format::Csv)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "h1,quadratic-sqrt2,stable,2,32,2,1,1,1,0,0,pass");
    }

    #[test]
    fn digest_of_empty_string() {
        assert_eq!(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn finish_keeps_info() {
        let mut s = SuiteRecord::new("negative-control", "x", 2, 32, 1, 1);
        s.status = Status::Info;
        s.finish();
        assert_eq!(s.status, Status::Info);
        let mut f = SuiteRecord::new("cascade", "x", 2, 32, 1, 1);
        f.checks.push(CheckRecord::single("level 1", false));
        f.finish();
        assert_eq!((f.status, f.failures), (Status::Fail, 1));
    }
}
