//! Scenario runner: parses scenario files, builds the groups, automorphisms
//! and distributions they describe, runs their checks and reports.

pub mod build;
pub mod checks;
pub mod report;
pub mod scenario;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use heyde_core::dist::pd::PD_TOL;
use heyde_core::heyde::{exact::JOINT_TOL, mc::MC_LEVEL};
use heyde_core::structure::decompose::{FIT_TOL, MEASURE_TOL};
use heyde_core::GridSpec;

use crate::build::Context;
use crate::checks::{default_tolerance, run_check, CheckEnv};
pub use crate::report::Format;
use crate::report::{CheckRecord, Environment, Report, Status, Summary, Tolerances, REPORT_SCHEMA};
pub use crate::scenario::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Capacity(_) => 3,
            _ => 2,
        }
    }

    pub fn context(self, at: &str) -> Self {
        match self {
            CliError::Parse(m) => CliError::Parse(format!("{at}: {m}")),
            CliError::Config(m) => CliError::Config(format!("{at}: {m}")),
            CliError::Capacity(m) => CliError::Capacity(format!("{at}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{at}: {m}")),
        }
    }
}

impl From<heyde_core::Error> for CliError {
    fn from(e: heyde_core::Error) -> Self {
        match e {
            heyde_core::Error::Capacity {
                what,
                needed,
                bound,
            } => CliError::Capacity(format!("{what} needs {needed} elements, bound is {bound}")),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Scenarios shipped with the binary, by name.
pub const BUNDLED: [(&str, &str); 8] = [
    ("remark_2_1", include_str!("../scenarios/remark_2_1.toml")),
    ("remark_2_2", include_str!("../scenarios/remark_2_2.toml")),
    ("remark_3_1", include_str!("../scenarios/remark_3_1.toml")),
    (
        "theorem_2_1_roundtrip",
        include_str!("../scenarios/theorem_2_1_roundtrip.toml"),
    ),
    (
        "prop_2_1_adic",
        include_str!("../scenarios/prop_2_1_adic.toml"),
    ),
    (
        "solenoid_gauss",
        include_str!("../scenarios/solenoid_gauss.toml"),
    ),
    (
        "lemma21_fuzz",
        include_str!("../scenarios/lemma21_fuzz.toml"),
    ),
    (
        "lemma24_polynomials",
        include_str!("../scenarios/lemma24_polynomials.toml"),
    ),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Loads a scenario from a file path, falling back to a bundled name.
pub fn load_scenario(arg: &str) -> Result<Scenario, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{arg}: {e}")))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
        return Scenario::parse(name, &text);
    }
    match bundled(arg) {
        Some(text) => Scenario::parse(arg, text),
        None => Err(CliError::Io(format!(
            "{arg}: no such file or bundled scenario"
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub workers: usize,
    pub tolerance: Option<f64>,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: None,
            workers: 1,
            tolerance: None,
            timings: false,
        }
    }
}

/// Runs every check in order. Check `i` (from 0) draws its randomness
/// from `seed + i`.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<Report, CliError> {
    if opts.workers == 0 {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    let ctx = Context::build(s)?;
    let seed = opts.seed.unwrap_or(s.seed);
    let base_tol = opts
        .tolerance
        .or(s.tolerance)
        .unwrap_or_else(default_tolerance);
    let mut records = Vec::with_capacity(s.checks.len());
    for (i, check) in s.checks.iter().enumerate() {
        let tolerance = opts.tolerance.or(check.tolerance).unwrap_or(base_tol);
        let env = CheckEnv {
            seed: seed.wrapping_add(i as u64),
            workers: opts.workers,
            tolerance,
            grid: check.grid.or(s.grid).unwrap_or_default(),
        };
        let start = Instant::now();
        let out = run_check(check, &ctx, &env)
            .map_err(|e| e.context(&format!("check {} (`{}`)", i + 1, check.name)))?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let status = match check.expect {
            None => Status::Unchecked,
            Some(e) if e == out.verdict => Status::Ok,
            Some(_) => Status::Mismatch,
        };
        records.push(CheckRecord {
            index: i + 1,
            name: check.name.clone(),
            kind: check.kind.name().to_string(),
            verdict: out.verdict,
            expect: check.expect,
            status,
            summary: out.summary,
            max_residual: out.max_residual,
            p_value: out.p_value,
            witness: out.witness,
            tolerance,
            detail: out.detail,
            wall_time_ms: opts.timings.then_some(elapsed),
        });
    }
    let summary = Summary {
        checks: records.len(),
        expectations: records.iter().filter(|r| r.expect.is_some()).count(),
        mismatches: records
            .iter()
            .filter(|r| r.status == Status::Mismatch)
            .count(),
    };
    Ok(Report {
        schema: REPORT_SCHEMA,
        scenario: s.name.clone(),
        description: s.description.trim().to_string(),
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            workers: opts.workers,
            tolerances: Tolerances {
                residual: base_tol,
                joint: JOINT_TOL,
                fit: FIT_TOL,
                measure: MEASURE_TOL,
                pd: PD_TOL,
                mc_level: MC_LEVEL,
            },
            conventions: vec!["psi = -log |mu_hat|^2 >= 0".to_string()],
        },
        checks: records,
        summary,
    })
}

fn compact<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("specs serialise")
}

/// A readable outline of a scenario without running it.
pub fn describe(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario  {}", s.name);
    for line in s.description.trim().lines() {
        let _ = writeln!(out, "          {line}");
    }
    let _ = writeln!(out, "seed      {}", s.seed);
    let grid = s.grid.unwrap_or_default();
    if s.grid.is_some() || grid != GridSpec::default() {
        let _ = writeln!(
            out,
            "grid      {} .. {} step {}",
            grid.lo, grid.hi, grid.step
        );
    }
    if let Some(g) = &s.group {
        let _ = writeln!(out, "group     {}", compact(g));
    }
    if let Some(a) = &s.automorphism {
        let _ = writeln!(out, "alpha     {}", compact(a));
    }
    if !s.distributions.is_empty() {
        let _ = writeln!(out, "distributions");
        for (name, d) in &s.distributions {
            let _ = writeln!(out, "  {name:<16} {}", compact(d));
        }
    }
    if !s.checks.is_empty() {
        let _ = writeln!(out, "checks");
        for (i, c) in s.checks.iter().enumerate() {
            let expect = c.expect.map_or(String::new(), |e| format!("  expect {e}"));
            let _ = writeln!(
                out,
                "  {:>2}. {:<36} {:<16}{expect}",
                i + 1,
                c.name,
                c.kind.name()
            );
        }
    }
    out
}
