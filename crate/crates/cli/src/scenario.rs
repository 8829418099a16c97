//! Scenario files: a versioned TOML tree describing a group, an
//! automorphism, named distributions and an ordered list of checks.

use std::collections::BTreeMap;

use heyde_core::heyde::SolenoidGrid;
use heyde_core::GridSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema: u32,
    #[serde(default)]
    description: String,
    #[serde(default)]
    seed: u64,
    tolerance: Option<f64>,
    grid: Option<GridOverride>,
    group: Option<GroupSpec>,
    automorphism: Option<AutomorphismSpec>,
    #[serde(default)]
    distributions: BTreeMap<String, DistSpec>,
    #[serde(default)]
    checks: Vec<toml::Table>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub grid: Option<GridSpec>,
    pub group: Option<GroupSpec>,
    pub automorphism: Option<AutomorphismSpec>,
    pub distributions: BTreeMap<String, DistSpec>,
    pub checks: Vec<CheckSpec>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl From<GridOverride> for GridSpec {
    fn from(g: GridOverride) -> Self {
        GridSpec {
            lo: g.lo,
            hi: g.hi,
            step: g.step,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Finite {
        moduli: Vec<u64>,
    },
    RealExt {
        real_dim: usize,
        #[serde(default)]
        moduli: Vec<u64>,
    },
    SolenoidDual {
        prefix: Vec<u64>,
        infinite_primes: Vec<u64>,
    },
    /// The a-adic integers, reached through their finite truncations.
    AdicIntegers {
        prefix: Vec<u64>,
        infinite_primes: Vec<u64>,
    },
    AdicTruncation {
        prefix: Vec<u64>,
        infinite_primes: Vec<u64>,
        level: usize,
    },
}

impl GroupSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            GroupSpec::Finite { .. } => "finite",
            GroupSpec::RealExt { .. } => "real_ext",
            GroupSpec::SolenoidDual { .. } => "solenoid_dual",
            GroupSpec::AdicIntegers { .. } => "adic_integers",
            GroupSpec::AdicTruncation { .. } => "adic_truncation",
        }
    }
}

/// Finite part as `matrix` or `scalar`, real part as `a` (scalar) or `real`
/// (matrix), solenoid and adic automorphisms as `p / q`.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    /// Probabilities indexed like the finite group (or finite part).
    Finite {
        probs: Vec<f64>,
    },
    Point {
        x: Vec<i64>,
    },
    /// Haar measure of the subgroup generated by `generators`, or of the
    /// whole finite part when omitted.
    Haar {
        #[serde(skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<Vec<i64>>>,
    },
    Remark31 {
        sigma: f64,
        sigma_prime: f64,
        kappa: f64,
    },
    QuadGauss {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        b: Option<Vec<f64>>,
    },
    SolenoidGauss {
        t: f64,
        sigma: f64,
    },
    Product {
        factors: Vec<String>,
    },
    Convolve {
        parts: Vec<String>,
    },
    Shift {
        base: String,
        x: Vec<i64>,
    },
}

impl DistSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            DistSpec::Finite { .. } => "finite",
            DistSpec::Point { .. } => "point",
            DistSpec::Haar { .. } => "haar",
            DistSpec::Remark31 { .. } => "remark31",
            DistSpec::QuadGauss { .. } => "quad_gauss",
            DistSpec::SolenoidGauss { .. } => "solenoid_gauss",
            DistSpec::Product { .. } => "product",
            DistSpec::Convolve { .. } => "convolve",
            DistSpec::Shift { .. } => "shift",
        }
    }

    pub fn references(&self) -> Vec<&str> {
        match self {
            DistSpec::Product { factors: v } | DistSpec::Convolve { parts: v } => {
                v.iter().map(String::as_str).collect()
            }
            DistSpec::Shift { base, .. } => vec![base.as_str()],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Torsion {
    Auto(String),
    Explicit(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckKind {
    Eq2Exact {
        mu1: String,
        mu2: String,
    },
    Eq2Grid {
        mu1: String,
        mu2: String,
        max_level: Option<usize>,
        radius: Option<f64>,
    },
    Eq5 {
        mu1: String,
        mu2: String,
    },
    CondSymExact {
        mu1: String,
        mu2: String,
    },
    CondSymMc {
        mu1: String,
        mu2: String,
        samples: Option<usize>,
        bins: Option<usize>,
    },
    Condition1 {},
    KernelEvidence {
        level: usize,
    },
    Decompose {
        distribution: String,
        torsion: Option<Torsion>,
    },
    Pd {
        distribution: String,
        max_level: Option<usize>,
        radius: Option<f64>,
    },
    Localize {
        distribution: String,
        generators: Vec<Vec<i64>>,
    },
    Truncation {
        level: usize,
        #[serde(default = "default_pairs")]
        pairs: usize,
    },
    OracleFuzz {
        count: usize,
        max_order: usize,
    },
    PolynomialFuzz {
        count: usize,
        max_n: u64,
        max_degree: usize,
    },
    GaussianPhi {
        max_n: u64,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    PqFuzz {
        count: usize,
        max_order: usize,
    },
}

fn default_pairs() -> usize {
    20
}

fn default_trials() -> usize {
    20
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Eq2Exact { .. } => "eq2_exact",
            CheckKind::Eq2Grid { .. } => "eq2_grid",
            CheckKind::Eq5 { .. } => "eq5",
            CheckKind::CondSymExact { .. } => "cond_sym_exact",
            CheckKind::CondSymMc { .. } => "cond_sym_mc",
            CheckKind::Condition1 {} => "condition1",
            CheckKind::KernelEvidence { .. } => "kernel_evidence",
            CheckKind::Decompose { .. } => "decompose",
            CheckKind::Pd { .. } => "pd",
            CheckKind::Localize { .. } => "localize",
            CheckKind::Truncation { .. } => "truncation",
            CheckKind::OracleFuzz { .. } => "oracle_fuzz",
            CheckKind::PolynomialFuzz { .. } => "polynomial_fuzz",
            CheckKind::GaussianPhi { .. } => "gaussian_phi",
            CheckKind::PqFuzz { .. } => "pq_fuzz",
        }
    }

    /// Distribution names the check refers to.
    pub fn references(&self) -> Vec<&str> {
        match self {
            CheckKind::Eq2Exact { mu1, mu2 }
            | CheckKind::Eq2Grid { mu1, mu2, .. }
            | CheckKind::Eq5 { mu1, mu2 }
            | CheckKind::CondSymExact { mu1, mu2 }
            | CheckKind::CondSymMc { mu1, mu2, .. } => vec![mu1.as_str(), mu2.as_str()],
            CheckKind::Decompose { distribution, .. }
            | CheckKind::Pd { distribution, .. }
            | CheckKind::Localize { distribution, .. } => vec![distribution.as_str()],
            _ => Vec::new(),
        }
    }
}

/// One entry of `[[checks]]`: shared keys plus the kind-specific table.
#[derive(Clone, Debug)]
pub struct CheckSpec {
    pub name: String,
    pub expect: Option<bool>,
    pub tolerance: Option<f64>,
    pub grid: Option<GridSpec>,
    pub automorphism: Option<AutomorphismSpec>,
    pub kind: CheckKind,
}

impl CheckSpec {
    pub fn solenoid_grid(&self) -> SolenoidGrid {
        let d = SolenoidGrid::default();
        let (max_level, radius) = match &self.kind {
            CheckKind::Eq2Grid {
                max_level, radius, ..
            }
            | CheckKind::Pd {
                max_level, radius, ..
            } => (*max_level, *radius),
            _ => (None, None),
        };
        SolenoidGrid {
            max_level: max_level.unwrap_or(d.max_level),
            radius: radius.unwrap_or(d.radius),
        }
    }
}

fn take<T: serde::de::DeserializeOwned>(
    table: &mut toml::Table,
    key: &str,
    at: &str,
) -> Result<Option<T>, CliError> {
    table
        .remove(key)
        .map(|v| {
            v.try_into()
                .map_err(|e| CliError::Parse(format!("{at}.{key}: {e}")))
        })
        .transpose()
}

fn parse_check(index: usize, mut table: toml::Table) -> Result<CheckSpec, CliError> {
    let at = format!("check {}", index + 1);
    let name: Option<String> = take(&mut table, "name", &at)?;
    let expect = take(&mut table, "expect", &at)?;
    let tolerance = take(&mut table, "tolerance", &at)?;
    let grid: Option<GridOverride> = take(&mut table, "grid", &at)?;
    let automorphism = take(&mut table, "automorphism", &at)?;
    let kind: CheckKind = toml::Value::Table(table)
        .try_into()
        .map_err(|e| CliError::Parse(format!("{at}: {e}")))?;
    Ok(CheckSpec {
        name: name.unwrap_or_else(|| kind.name().to_string()),
        expect,
        tolerance,
        grid: grid.map(Into::into),
        automorphism,
        kind,
    })
}

impl Scenario {
    /// Parses and validates the references of a scenario.
    pub fn parse(name: &str, text: &str) -> Result<Self, CliError> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| CliError::Parse(format!("{name}: {e}")))?;
        if raw.schema != SCHEMA {
            return Err(CliError::Config(format!(
                "{name}: unsupported schema {}, expected {SCHEMA}",
                raw.schema
            )));
        }
        let checks = raw
            .checks
            .into_iter()
            .enumerate()
            .map(|(i, t)| parse_check(i, t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| match e {
                CliError::Parse(m) => CliError::Parse(format!("{name}: {m}")),
                other => other,
            })?;
        let s = Scenario {
            name: name.to_string(),
            description: raw.description,
            seed: raw.seed,
            tolerance: raw.tolerance,
            grid: raw.grid.map(Into::into),
            group: raw.group,
            automorphism: raw.automorphism,
            distributions: raw.distributions,
            checks,
        };
        s.check_references()?;
        Ok(s)
    }

    fn check_references(&self) -> Result<(), CliError> {
        for (name, d) in &self.distributions {
            for r in d.references() {
                if !self.distributions.contains_key(r) {
                    return Err(CliError::Config(format!(
                        "distribution `{name}` refers to unknown distribution `{r}`"
                    )));
                }
            }
        }
        for (i, c) in self.checks.iter().enumerate() {
            for r in c.kind.references() {
                if !self.distributions.contains_key(r) {
                    return Err(CliError::Config(format!(
                        "check {} (`{}`) refers to unknown distribution `{r}`",
                        i + 1,
                        c.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_keys_are_split_from_the_kind() {
        let s = Scenario::parse(
            "t",
            "schema = 1\n[[checks]]\nkind = \"truncation\"\nlevel = 2\nname = \"x\"\nexpect = true\n\
             grid = { lo = -1.0, hi = 1.0, step = 0.5 }\n",
        )
        .unwrap();
        let c = &s.checks[0];
        assert_eq!(c.name, "x");
        assert_eq!(c.expect, Some(true));
        assert_eq!(c.grid.unwrap().step, 0.5);
        assert!(matches!(
            c.kind,
            CheckKind::Truncation {
                level: 2,
                pairs: 20
            }
        ));
    }

    #[test]
    fn unknown_keys_fail_everywhere() {
        for text in [
            "schema = 1\nextra = 1\n",
            "schema = 1\ngroup = { type = \"finite\", moduli = [2], extra = 1 }\n",
            "schema = 1\n[distributions]\na = { type = \"point\", x = [0], extra = 1 }\n",
            "schema = 1\n[[checks]]\nkind = \"pd\"\ndistribution = \"a\"\nextra = 1\n",
            "schema = 1\n[[checks]]\nkind = \"no_such_kind\"\n",
            "schema = 1\ngrid = { lo = 0.0, hi = 1.0, step = 0.1, extra = 1 }\n",
        ] {
            assert!(
                matches!(Scenario::parse("t", text), Err(CliError::Parse(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn bundled_scenarios_parse() {
        for (name, text) in crate::BUNDLED {
            let s = Scenario::parse(name, text).unwrap();
            assert!(!s.checks.is_empty());
        }
    }
}
