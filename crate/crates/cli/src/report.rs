//! Run reports and their text and JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// The verdict matches `expect`.
    Ok,
    Mismatch,
    /// No expectation was given.
    Unchecked,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub index: usize,
    pub name: String,
    pub kind: String,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<bool>,
    pub status: Status,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(String, String)>,
    pub tolerance: f64,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub residual: f64,
    pub joint: f64,
    pub fit: f64,
    pub measure: f64,
    pub pd: f64,
    pub mc_level: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub workers: usize,
    pub tolerances: Tolerances,
    pub conventions: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub expectations: usize,
    pub mismatches: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: String,
    pub description: String,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

impl Report {
    pub fn mismatches(&self) -> usize {
        self.summary.mismatches
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("report serialises");
                s.push('\n');
                s
            }
        }
    }

    fn to_text(&self) -> String {
        let env = &self.environment;
        let t = &env.tolerances;
        let mut out = String::new();
        let _ = writeln!(out, "scenario  {}", self.scenario);
        for line in self.description.lines() {
            let _ = writeln!(out, "          {line}");
        }
        let _ = writeln!(
            out,
            "heyde {}  seed {}  workers {}",
            env.version, env.seed, env.workers
        );
        let _ = writeln!(
            out,
            "tolerances  residual {:e}  joint {:e}  fit {:e}  measure {:e}  pd {:e}  mc level {}",
            t.residual, t.joint, t.fit, t.measure, t.pd, t.mc_level
        );
        for c in &env.conventions {
            let _ = writeln!(out, "convention  {c}");
        }
        if self.checks.is_empty() {
            return out;
        }
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>3}  {:<width$}  {:<15}  {:<7}  {:<6}  {:<9}  detail",
            "#", "name", "kind", "verdict", "expect", "status"
        );
        for c in &self.checks {
            let expect = c.expect.map_or("-".to_string(), |e| e.to_string());
            let status = match c.status {
                Status::Ok => "ok",
                Status::Mismatch => "MISMATCH",
                Status::Unchecked => "-",
            };
            let mut line = format!(
                "{:>3}  {:<width$}  {:<15}  {:<7}  {:<6}  {:<9}  {}",
                c.index, c.name, c.kind, c.verdict, expect, status, c.summary
            );
            if let Some(ms) = c.wall_time_ms {
                let _ = write!(line, "  [{ms:.1} ms]");
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let s = &self.summary;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{} checks, {} with expectations, {} mismatches",
            s.checks, s.expectations, s.mismatches
        );
        out
    }
}
