//! Check results, the verification report, and its two renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use super::Config;
use crate::error::Result;
use crate::mesh::TopologySummary;
use crate::operators::SpectrumResult;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::ReportOnly => "report-only",
            Self::Error => "error",
        }
    }

    /// Whether the suite verdict is affected.
    pub fn is_failure(&self) -> bool {
        matches!(self, Self::Fail | Self::Error)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// What the check is about, in words.
    pub anchor: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub tolerance: Option<f64>,
    /// Non-negative when the asserted relation holds.
    pub margin: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
    pub details: Value,
    pub note: String,
}

impl CheckResult {
    pub fn new(name: &str, anchor: &str) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            lhs: None,
            rhs: None,
            tolerance: None,
            margin: None,
            status: Status::ReportOnly,
            runtime_ms: None,
            details: json!({}),
            note: String::new(),
        }
    }

    pub fn values(mut self, lhs: f64, rhs: f64, tolerance: f64, margin: f64) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self.tolerance = Some(tolerance);
        self.margin = Some(margin);
        self
    }

    pub fn status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    /// Pass or fail on the margin sign.
    pub fn asserted(self, holds: bool) -> Self {
        self.status(if holds { Status::Pass } else { Status::Fail })
    }

    pub fn details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn errored(name: &str, anchor: &str, err: &crate::error::Error) -> Self {
        Self::new(name, anchor).status(Status::Error).note(err.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub generator: Option<String>,
    pub parameters: BTreeMap<String, String>,
    pub mesh_hash: String,
    /// How refined levels were produced: `regenerated`, `midpoint`, or `none`.
    pub refinement: String,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub provenance: Provenance,
    pub config: Config,
    pub topology: TopologySummary,
    pub checks: Vec<CheckResult>,
    /// Wall-clock of shared stages; only filled with `config.timings`.
    pub timings: Option<BTreeMap<String, f64>>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|c| c.status.is_failure())
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() { "pass" } else { "fail" }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() { 0 } else { 1 }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "provenance": self.provenance,
            "config": self.config,
            "topology": self.topology,
            "checks": self.checks,
            "verdict": self.verdict(),
            "convention": {
                "eigenvalues": SpectrumResult::<f64>::CONVENTION,
                "meaning": "eta is the Rayleigh quotient of the stability form; L phi = -eta phi",
            },
        });
        if let Some(t) = &self.timings {
            v["timings_ms"] = json!(t);
        }
        v
    }

    /// Canonical JSON: sorted keys, two-space indent, trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let num = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4e}"));
        let mut out = String::new();
        let p = &self.provenance;
        let _ = writeln!(
            out,
            "mesh {} ({}), V={} E={} F={} genus={} boundary loops={}",
            &p.mesh_hash[..12.min(p.mesh_hash.len())],
            p.generator.as_deref().unwrap_or("unknown source"),
            self.topology.vertices,
            self.topology.edges,
            self.topology.faces,
            self.topology.genus,
            self.topology.boundary_loops,
        );
        let _ = writeln!(
            out,
            "{:<26} {:<11} {:>12} {:>12} {:>12} {:>12}  note",
            "check", "status", "lhs", "rhs", "tolerance", "margin"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<26} {:<11} {:>12} {:>12} {:>12} {:>12}  {}",
                c.name,
                c.status.as_str(),
                num(c.lhs),
                num(c.rhs),
                num(c.tolerance),
                num(c.margin),
                c.note
            );
        }
        let _ = writeln!(out, "verdict: {}", self.verdict());
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

pub fn report_emit<W: Write>(report: &VerificationReport, format: Format, out: &mut W) -> Result<()> {
    match format {
        Format::Json => out.write_all(report.to_json_string().as_bytes())?,
        Format::Table => out.write_all(report.to_table().as_bytes())?,
    }
    Ok(())
}
