//! Turns scenario specs into core objects.

use std::collections::BTreeMap;

use heyde_core::extended::RealExtGroup;
use heyde_core::{
    Element, FiniteAbelianGroup, FiniteDist, FourierGaussCharFn, Homomorphism, RealExtAutomorphism,
    SolenoidAutomorphism, SolenoidGaussCharFn, SolenoidSpec, Subgroup,
};
use num_integer::Integer;

use crate::scenario::{AutomorphismSpec, DistSpec, GroupSpec, Scenario};
use crate::CliError;

#[derive(Clone, Debug)]
pub enum Group {
    Finite(FiniteAbelianGroup),
    RealExt(RealExtGroup),
    Solenoid(SolenoidSpec),
    Adic(SolenoidSpec),
}

#[derive(Clone, Debug)]
pub enum Automorphism {
    Finite(Homomorphism),
    RealExt(RealExtAutomorphism),
    Solenoid(SolenoidAutomorphism),
    /// `p / q` acting on the a-adic integers.
    Adic {
        p: i64,
        q: i64,
    },
}

#[derive(Clone, Debug)]
pub enum Law {
    Finite(FiniteDist),
    RealExt(FourierGaussCharFn),
    Solenoid(SolenoidGaussCharFn),
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn build_group(spec: &GroupSpec) -> Result<Group, CliError> {
    Ok(match spec {
        GroupSpec::Finite { moduli } => Group::Finite(FiniteAbelianGroup::new(moduli.clone())?),
        GroupSpec::RealExt { real_dim, moduli } => {
            let finite = if moduli.is_empty() {
                FiniteAbelianGroup::trivial()
            } else {
                FiniteAbelianGroup::new(moduli.clone())?
            };
            Group::RealExt(RealExtGroup::new(*real_dim, finite)?)
        }
        GroupSpec::SolenoidDual {
            prefix,
            infinite_primes,
        } => Group::Solenoid(SolenoidSpec::new(
            prefix.clone(),
            infinite_primes.iter().copied(),
        )?),
        GroupSpec::AdicIntegers {
            prefix,
            infinite_primes,
        } => Group::Adic(SolenoidSpec::new(
            prefix.clone(),
            infinite_primes.iter().copied(),
        )?),
        GroupSpec::AdicTruncation {
            prefix,
            infinite_primes,
            level,
        } => {
            let spec = SolenoidSpec::new(prefix.clone(), infinite_primes.iter().copied())?;
            Group::Finite(spec.adic_truncation(*level)?)
        }
    })
}

fn finite_part(
    spec: &AutomorphismSpec,
    group: &FiniteAbelianGroup,
) -> Result<Option<Homomorphism>, CliError> {
    let h = match (&spec.matrix, spec.scalar) {
        (Some(_), Some(_)) => {
            return Err(config(
                "automorphism: give either `matrix` or `scalar`, not both",
            ))
        }
        (Some(m), None) => Homomorphism::endomorphism(group, m.clone())?,
        (None, Some(n)) => Homomorphism::scalar(group, n),
        (None, None) => return Ok(None),
    };
    if !h.is_automorphism() {
        return Err(config(format!(
            "automorphism: finite part is not bijective on {group}"
        )));
    }
    Ok(Some(h))
}

fn reject(present: bool, what: &str, group: &str) -> Result<(), CliError> {
    if present {
        Err(config(format!(
            "automorphism: `{what}` does not apply to a {group} group"
        )))
    } else {
        Ok(())
    }
}

pub fn build_automorphism(
    spec: &AutomorphismSpec,
    group: &Group,
) -> Result<Automorphism, CliError> {
    match group {
        Group::Finite(g) => {
            reject(spec.a.is_some() || spec.real.is_some(), "a/real", "finite")?;
            reject(spec.p.is_some() || spec.q.is_some(), "p/q", "finite")?;
            let h = finite_part(spec, g)?
                .ok_or_else(|| config("automorphism: finite groups need `matrix` or `scalar`"))?;
            Ok(Automorphism::Finite(h))
        }
        Group::RealExt(g) => {
            reject(spec.p.is_some() || spec.q.is_some(), "p/q", "real_ext")?;
            let fin = finite_part(spec, g.finite())?
                .unwrap_or_else(|| Homomorphism::identity(g.finite()));
            let alpha = match (spec.a, &spec.real) {
                (Some(a), None) => RealExtAutomorphism::scalar(g, a, fin)?,
                (None, Some(rows)) => {
                    let d = g.real_dim();
                    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                        return Err(config(format!("automorphism: `real` must be {d}x{d}")));
                    }
                    RealExtAutomorphism::new(g, rows.concat(), fin)?
                }
                _ => {
                    return Err(config(
                        "automorphism: real_ext groups need exactly one of `a` or `real`",
                    ))
                }
            };
            Ok(Automorphism::RealExt(alpha))
        }
        Group::Solenoid(s) | Group::Adic(s) => {
            reject(
                spec.matrix.is_some() || spec.scalar.is_some(),
                "matrix/scalar",
                group_kind(group),
            )?;
            reject(
                spec.a.is_some() || spec.real.is_some(),
                "a/real",
                group_kind(group),
            )?;
            let p = spec
                .p
                .ok_or_else(|| config("automorphism: `p` is required"))?;
            let q = spec.q.unwrap_or(1);
            if matches!(group, Group::Solenoid(_)) {
                Ok(Automorphism::Solenoid(SolenoidAutomorphism::new(s, p, q)?))
            } else {
                if q == 0 || p == 0 {
                    return Err(config("automorphism: p and q must be nonzero"));
                }
                Ok(Automorphism::Adic { p, q })
            }
        }
    }
}

pub fn group_kind(group: &Group) -> &'static str {
    match group {
        Group::Finite(_) => "finite",
        Group::RealExt(_) => "real_ext",
        Group::Solenoid(_) => "solenoid_dual",
        Group::Adic(_) => "adic_integers",
    }
}

/// Multiplication by `p q^{-1}` on the truncation `Z(m)`; `None` unless both
/// `p` and `q` are units mod `m`.
pub fn adic_action(group: &FiniteAbelianGroup, p: i64, q: i64) -> Option<Homomorphism> {
    let m = *group.moduli().first()? as i64;
    let gq = q.extended_gcd(&m);
    if gq.gcd != 1 || p.gcd(&m) != 1 {
        return None;
    }
    let factor = (p.mod_floor(&m) * gq.x.mod_floor(&m)).mod_floor(&m);
    Some(Homomorphism::scalar(group, factor))
}

fn elements(g: &FiniteAbelianGroup, coords: &[Vec<i64>]) -> Result<Vec<Element>, CliError> {
    coords.iter().map(|c| Ok(g.element(c)?)).collect()
}

fn finite_of(group: &Group) -> Option<&FiniteAbelianGroup> {
    match group {
        Group::Finite(g) => Some(g),
        Group::RealExt(g) => Some(g.finite()),
        _ => None,
    }
}

struct Builder<'a> {
    group: &'a Group,
    specs: &'a BTreeMap<String, DistSpec>,
    done: BTreeMap<String, Law>,
    active: Vec<String>,
}

impl Builder<'_> {
    fn get(&mut self, name: &str) -> Result<Law, CliError> {
        if let Some(l) = self.done.get(name) {
            return Ok(l.clone());
        }
        if self.active.iter().any(|a| a == name) {
            return Err(config(format!("distribution `{name}` refers to itself")));
        }
        let spec = self
            .specs
            .get(name)
            .ok_or_else(|| config(format!("unknown distribution `{name}`")))?;
        self.active.push(name.to_string());
        let law = self
            .make(spec)
            .map_err(|e| e.context(&format!("distribution `{name}`")))?;
        self.active.pop();
        self.done.insert(name.to_string(), law.clone());
        Ok(law)
    }

    fn lift(&self, omega: FiniteDist) -> Result<Law, CliError> {
        Ok(match self.group {
            Group::RealExt(g) => Law::RealExt(FourierGaussCharFn::from_finite(g, &omega)?),
            _ => Law::Finite(omega),
        })
    }

    fn make(&mut self, spec: &DistSpec) -> Result<Law, CliError> {
        let group = self.group;
        let unsupported = || {
            config(format!(
                "type `{}` is not available on a {} group",
                spec.type_name(),
                group_kind(group)
            ))
        };
        match spec {
            DistSpec::Finite { probs } => {
                let f = finite_of(group).ok_or_else(unsupported)?;
                self.lift(FiniteDist::new(f, probs.clone())?)
            }
            DistSpec::Point { x } => {
                let f = finite_of(group).ok_or_else(unsupported)?;
                self.lift(FiniteDist::point(f, &f.element(x)?)?)
            }
            DistSpec::Haar { generators } => {
                let f = finite_of(group).ok_or_else(unsupported)?;
                let sub = match generators {
                    Some(g) => Subgroup::generated_by(f, &elements(f, g)?)?,
                    None => Subgroup::whole(f),
                };
                self.lift(FiniteDist::uniform_on(&sub))
            }
            DistSpec::Remark31 {
                sigma,
                sigma_prime,
                kappa,
            } => {
                let Group::RealExt(g) = group else {
                    return Err(unsupported());
                };
                let c = FourierGaussCharFn::remark31_family(*sigma, *sigma_prime, *kappa)?;
                if c.group() != g {
                    return Err(config("type `remark31` needs the group R x Z(2)"));
                }
                Ok(Law::RealExt(c))
            }
            DistSpec::QuadGauss { a, b } => {
                let Group::RealExt(g) = group else {
                    return Err(unsupported());
                };
                let d = g.real_dim();
                if a.len() != d || a.iter().any(|r| r.len() != d) {
                    return Err(config(format!("`A` must be {d}x{d}")));
                }
                let b = b.clone().unwrap_or_else(|| vec![0.0; d]);
                let f = g.finite();
                let e0 = FiniteDist::point(f, &f.zero())?;
                Ok(Law::RealExt(FourierGaussCharFn::product_law(
                    g,
                    a.concat(),
                    b,
                    &e0,
                    &f.zero(),
                )?))
            }
            DistSpec::SolenoidGauss { t, sigma } => {
                if !matches!(group, Group::Solenoid(_)) {
                    return Err(unsupported());
                }
                Ok(Law::Solenoid(SolenoidGaussCharFn::new(*t, *sigma)?))
            }
            DistSpec::Product { factors: names } | DistSpec::Convolve { parts: names } => {
                let mut it = names.iter();
                let first = it.next().ok_or_else(|| config("needs at least one part"))?;
                let mut acc = self.get(first)?;
                for n in it {
                    acc = match (acc, self.get(n)?) {
                        (Law::Finite(a), Law::Finite(b)) => Law::Finite(a.convolve(&b)?),
                        (Law::RealExt(a), Law::RealExt(b)) => Law::RealExt(a.product(&b)?),
                        (Law::Solenoid(a), Law::Solenoid(b)) => Law::Solenoid(a.product(&b)),
                        _ => return Err(config("parts live on different groups")),
                    };
                }
                Ok(acc)
            }
            DistSpec::Shift { base, x } => {
                let f = finite_of(group).ok_or_else(unsupported)?;
                let x = f.element(x)?;
                Ok(match self.get(base)? {
                    Law::Finite(d) => Law::Finite(d.shift(&x)?),
                    Law::RealExt(c) => {
                        let Group::RealExt(g) = group else {
                            return Err(unsupported());
                        };
                        let point = FourierGaussCharFn::from_finite(g, &FiniteDist::point(f, &x)?)?;
                        Law::RealExt(c.product(&point)?)
                    }
                    Law::Solenoid(_) => return Err(unsupported()),
                })
            }
        }
    }
}

/// Everything a scenario's checks refer to.
#[derive(Clone, Debug)]
pub struct Context {
    pub group: Option<Group>,
    pub automorphism: Option<Automorphism>,
    pub laws: BTreeMap<String, Law>,
}

impl Context {
    pub fn build(s: &Scenario) -> Result<Self, CliError> {
        let group = s.group.as_ref().map(build_group).transpose()?;
        let automorphism = match (&group, &s.automorphism) {
            (Some(g), Some(a)) => Some(build_automorphism(a, g)?),
            (None, Some(_)) => return Err(config("an automorphism needs a group")),
            _ => None,
        };
        let mut laws = BTreeMap::new();
        if !s.distributions.is_empty() {
            let g = group
                .as_ref()
                .ok_or_else(|| config("distributions need a group"))?;
            let mut b = Builder {
                group: g,
                specs: &s.distributions,
                done: BTreeMap::new(),
                active: Vec::new(),
            };
            for name in s.distributions.keys() {
                b.get(name)?;
            }
            laws = b.done;
        }
        Ok(Context {
            group,
            automorphism,
            laws,
        })
    }

    pub fn law(&self, name: &str) -> Result<&Law, CliError> {
        self.laws
            .get(name)
            .ok_or_else(|| config(format!("unknown distribution `{name}`")))
    }
}
