//! Executes one scenario check against the built context.

use heyde_core::dist::pd::PD_TOL;
use heyde_core::dist::{pd_check_finite, pd_check_gauss, pd_inequality, stream_rng};
use heyde_core::extended::solenoid_condition1;
use heyde_core::fuzz;
use heyde_core::heyde::{
    conditional_symmetry_exact, conditional_symmetry_mc, eq2_exact, eq2_grid, eq2_solenoid,
    eq5_exact, eq5_grid,
};
use heyde_core::structure::{
    decompose, decompose_finite, gaussian_phi_check, is_polynomial, psi_from,
    quadratic_solution_dim, support_localize, verify_pq, DualFunction,
};
use heyde_core::{
    check_condition1, dft, two_torsion, FiniteAbelianGroup, GridSpec, McConfig, ResidualReport,
    Subgroup,
};
use num_integer::Integer;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::build::{
    adic_action, build_automorphism, group_kind, Automorphism, Context, Group, Law,
};
use crate::scenario::{CheckKind, CheckSpec, Torsion};
use crate::CliError;

/// Settings resolved for one check.
#[derive(Clone, Debug)]
pub struct CheckEnv {
    pub seed: u64,
    pub workers: usize,
    pub tolerance: f64,
    pub grid: GridSpec,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: bool,
    pub summary: String,
    pub max_residual: Option<f64>,
    pub p_value: Option<f64>,
    pub witness: Option<(String, String)>,
    pub detail: Value,
}

impl Outcome {
    fn plain(verdict: bool, summary: String, detail: Value) -> Self {
        Outcome {
            verdict,
            summary,
            max_residual: None,
            p_value: None,
            witness: None,
            detail,
        }
    }

    fn residual(r: ResidualReport, tol: f64) -> Self {
        let verdict = r.max_residual < tol;
        Outcome {
            verdict,
            summary: format!(
                "max residual {:.3e} over {} points",
                r.max_residual, r.points_checked
            ),
            max_residual: Some(r.max_residual),
            p_value: None,
            witness: r.witness.clone(),
            detail: to_json(&r),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn fmt_p(p: f64) -> String {
    if p >= 1e-3 {
        format!("{p:.4}")
    } else {
        format!("{p:.2e}")
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn mismatch(kind: &str, what: &str) -> CliError {
    config(format!("`{kind}` does not apply to {what}"))
}

fn finite_pair<'a>(
    ctx: &'a Context,
    mu1: &str,
    mu2: &str,
    kind: &str,
) -> Result<(&'a heyde_core::FiniteDist, &'a heyde_core::FiniteDist), CliError> {
    match (ctx.law(mu1)?, ctx.law(mu2)?) {
        (Law::Finite(a), Law::Finite(b)) => Ok((a, b)),
        _ => Err(mismatch(kind, "non-finite distributions")),
    }
}

fn torsion_subgroup(
    t: &Option<Torsion>,
    f: &FiniteAbelianGroup,
) -> Result<Option<Subgroup>, CliError> {
    match t {
        None => Ok(None),
        Some(Torsion::Auto(s)) if s == "auto" => Ok(None),
        Some(Torsion::Auto(s)) => Err(config(format!(
            "torsion must be \"auto\" or a list of generators, got {s:?}"
        ))),
        Some(Torsion::Explicit(gens)) => {
            let els = gens
                .iter()
                .map(|c| f.element(c))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Some(Subgroup::generated_by(f, &els)?))
        }
    }
}

fn adic_condition1(group: &Group, p: i64, q: i64) -> bool {
    let Group::Adic(spec) = group else {
        return false;
    };
    let n = p + q;
    spec.prefix()
        .iter()
        .chain(spec.infinite_primes())
        .all(|&a| n.gcd(&(a as i64)) == 1)
}

pub fn run_check(check: &CheckSpec, ctx: &Context, env: &CheckEnv) -> Result<Outcome, CliError> {
    let kind = check.kind.name();
    let alpha = match (&check.automorphism, &ctx.group) {
        (Some(spec), Some(g)) => Some(build_automorphism(spec, g)?),
        (Some(_), None) => return Err(config("an automorphism needs a group")),
        (None, _) => ctx.automorphism.clone(),
    };
    let alpha = || {
        alpha
            .clone()
            .ok_or_else(|| config(format!("`{kind}` needs an automorphism")))
    };
    let group = || {
        ctx.group
            .as_ref()
            .ok_or_else(|| config(format!("`{kind}` needs a group")))
    };
    let tol = env.tolerance;

    match &check.kind {
        CheckKind::Eq2Exact { mu1, mu2 } => {
            let (m1, m2) = finite_pair(ctx, mu1, mu2, kind)?;
            let Automorphism::Finite(a) = alpha()? else {
                return Err(mismatch(kind, "this automorphism"));
            };
            Ok(Outcome::residual(
                eq2_exact(&dft(m1), &dft(m2), &a.adjoint())?,
                tol,
            ))
        }
        CheckKind::Eq2Grid { mu1, mu2, .. } => {
            match (ctx.law(mu1)?, ctx.law(mu2)?, alpha()?, group()?) {
                (Law::RealExt(c1), Law::RealExt(c2), Automorphism::RealExt(a), _) => {
                    Ok(Outcome::residual(eq2_grid(c1, c2, &a, &env.grid)?, tol))
                }
                (
                    Law::Solenoid(c1),
                    Law::Solenoid(c2),
                    Automorphism::Solenoid(a),
                    Group::Solenoid(spec),
                ) => Ok(Outcome::residual(
                    eq2_solenoid(c1, c2, spec, &a, &check.solenoid_grid())?,
                    tol,
                )),
                _ => Err(mismatch(
                    kind,
                    "these distributions; use eq2_exact on finite groups",
                )),
            }
        }
        CheckKind::Eq5 { mu1, mu2 } => match (ctx.law(mu1)?, ctx.law(mu2)?, alpha()?) {
            (Law::Finite(m1), Law::Finite(m2), Automorphism::Finite(a)) => Ok(Outcome::residual(
                eq5_exact(&dft(m1), &dft(m2), &a.adjoint())?,
                tol,
            )),
            (Law::RealExt(c1), Law::RealExt(c2), Automorphism::RealExt(a)) => {
                Ok(Outcome::residual(eq5_grid(c1, c2, &a, &env.grid)?, tol))
            }
            _ => Err(mismatch(kind, "these distributions")),
        },
        CheckKind::CondSymExact { mu1, mu2 } => {
            let (m1, m2) = finite_pair(ctx, mu1, mu2, kind)?;
            let Automorphism::Finite(a) = alpha()? else {
                return Err(mismatch(kind, "this automorphism"));
            };
            let r = conditional_symmetry_exact(m1, m2, &a)?;
            Ok(Outcome {
                verdict: r.symmetric,
                summary: format!("max asymmetry {:.3e}", r.max_asymmetry),
                max_residual: Some(r.max_asymmetry),
                p_value: None,
                witness: r.witness.clone(),
                detail: to_json(&r),
            })
        }
        CheckKind::CondSymMc {
            mu1,
            mu2,
            samples,
            bins,
        } => {
            let (Law::RealExt(c1), Law::RealExt(c2), Automorphism::RealExt(a)) =
                (ctx.law(mu1)?, ctx.law(mu2)?, alpha()?)
            else {
                return Err(mismatch(kind, "these distributions"));
            };
            let d = McConfig::default();
            let cfg = McConfig {
                samples: samples.unwrap_or(d.samples),
                bins: bins.unwrap_or(d.bins),
                seed: env.seed,
                workers: env.workers,
            };
            let r = conditional_symmetry_mc(c1, c2, &a, &cfg)?;
            Ok(Outcome {
                verdict: r.consistent,
                summary: format!(
                    "p = {} (chi-square {:.2}, {} df, {} samples)",
                    fmt_p(r.p_value),
                    r.statistic,
                    r.degrees_of_freedom,
                    r.samples
                ),
                max_residual: None,
                p_value: Some(r.p_value),
                witness: None,
                detail: to_json(&r),
            })
        }
        CheckKind::Condition1 {} => {
            let a = alpha()?;
            let holds = match (&a, group()?) {
                (Automorphism::Finite(h), _) => check_condition1(h)?,
                (Automorphism::RealExt(r), _) => r.condition1()?,
                (Automorphism::Solenoid(s), Group::Solenoid(spec)) => solenoid_condition1(spec, s),
                (Automorphism::Adic { p, q }, g) => adic_condition1(g, *p, *q),
                _ => return Err(mismatch(kind, "this group")),
            };
            let summary = if holds {
                "I + alpha is an automorphism".to_string()
            } else {
                "I + alpha is not an automorphism".to_string()
            };
            Ok(Outcome::plain(
                holds,
                summary,
                json!({ "condition1": holds }),
            ))
        }
        CheckKind::KernelEvidence { level } => {
            let (Automorphism::Solenoid(a), Group::Solenoid(spec)) = (alpha()?, group()?) else {
                return Err(mismatch(kind, "groups other than solenoid_dual"));
            };
            let n = (a.p() + a.q()).unsigned_abs();
            if n == 0 {
                return Ok(Outcome::plain(
                    false,
                    "I + alpha = 0".to_string(),
                    json!({ "n": 0, "kernel": "whole group" }),
                ));
            }
            let ev = spec.kernel_evidence(n, *level)?;
            Ok(Outcome::plain(
                ev.solenoid_kernel_order == 1,
                format!(
                    "|Ker(I + alpha)| = {} (truncation order {}, level {})",
                    ev.solenoid_kernel_order, ev.truncation_order, ev.level
                ),
                to_json(&ev),
            ))
        }
        CheckKind::Decompose {
            distribution,
            torsion,
        } => {
            let d = match ctx.law(distribution)? {
                Law::Finite(mu) => {
                    decompose_finite(&dft(mu), torsion_subgroup(torsion, mu.group())?.as_ref())?
                }
                Law::RealExt(c) => {
                    let g = torsion_subgroup(torsion, c.group().finite())?;
                    decompose(c, g.as_ref(), &env.grid)?
                }
                Law::Solenoid(_) => return Err(mismatch(kind, "solenoid distributions")),
            };
            let summary = match d.certificate.failed_step {
                None => format!("sigma {:.6}, b {:.6}, shift {}", d.sigma, d.b, d.shift),
                Some(step) => format!("fails at {}", to_json(&step).as_str().unwrap_or("?")),
            };
            Ok(Outcome::plain(d.success, summary, to_json(&d)))
        }
        CheckKind::Pd { distribution, .. } => {
            let r = match (ctx.law(distribution)?, group()?) {
                (Law::Finite(mu), _) => pd_check_finite(&dft(mu)),
                (Law::RealExt(c), _) => pd_check_gauss(c, &env.grid.points(c.group().real_dim())?),
                (Law::Solenoid(c), Group::Solenoid(spec)) => {
                    let g = check.solenoid_grid();
                    let pts = spec.dual_elements(g.max_level, g.radius)?;
                    pd_inequality(
                        &pts,
                        |r| c.eval(r),
                        |u, v| {
                            spec.dual_element(u.value() - v.value())
                                .expect("H_a is a group")
                        },
                        |r| r.value().to_string(),
                        PD_TOL,
                    )
                }
                _ => return Err(mismatch(kind, "this distribution")),
            };
            Ok(Outcome {
                verdict: r.holds,
                summary: format!(
                    "max violation {:.3e} over {} pairs",
                    r.max_violation, r.pairs_checked
                ),
                max_residual: Some(r.max_violation),
                p_value: None,
                witness: r.witness.clone(),
                detail: to_json(&r),
            })
        }
        CheckKind::Localize {
            distribution,
            generators,
        } => {
            let Law::Finite(mu) = ctx.law(distribution)? else {
                return Err(mismatch(kind, "non-finite distributions"));
            };
            let f = mu.group();
            let els = generators
                .iter()
                .map(|c| f.element(c))
                .collect::<Result<Vec<_>, _>>()?;
            let h = Subgroup::generated_by(f, &els)?;
            let inside = support_localize(mu, &h)?;
            Ok(Outcome::plain(
                inside,
                format!(
                    "support {} a subgroup of order {}",
                    if inside { "inside" } else { "not inside" },
                    h.order()
                ),
                json!({ "subgroup_order": h.order(), "support": mu.support().len(), "inside": inside }),
            ))
        }
        CheckKind::Truncation { level, pairs } => {
            truncation(group()?, &alpha()?, *level, *pairs, env)
        }
        CheckKind::OracleFuzz { count, max_order } => oracle_fuzz(*count, *max_order, env),
        CheckKind::PolynomialFuzz {
            count,
            max_n,
            max_degree,
        } => polynomial_fuzz(*count, *max_n, *max_degree, env),
        CheckKind::GaussianPhi { max_n, trials } => gaussian_phi(*max_n, *trials, env),
        CheckKind::PqFuzz { count, max_order } => pq_fuzz(*count, *max_order, env),
    }
}

fn truncation(
    group: &Group,
    alpha: &Automorphism,
    level: usize,
    pairs: usize,
    env: &CheckEnv,
) -> Result<Outcome, CliError> {
    let (Group::Adic(spec), Automorphism::Adic { p, q }) = (group, alpha) else {
        return Err(config(format!(
            "`truncation` needs an adic_integers group, not {}",
            group_kind(group)
        )));
    };
    let g = spec.adic_truncation(level)?;
    let act = adic_action(&g, *p, *q).ok_or_else(|| {
        config(format!(
            "{p}/{q} is not an automorphism of the truncation {g}"
        ))
    })?;
    let cond1 = check_condition1(&act)?;
    let dual = act.adjoint();
    let mut rng = stream_rng(env.seed, 0);
    let mut constructed_pass = 0;
    let mut eq2_passing = 0;
    let mut factorised = 0;
    let mut random_pass = 0;
    for i in 0..2 * pairs {
        let (m1, m2) = if i < pairs {
            fuzz::eq2_pair(&mut rng, &act)
        } else {
            (
                fuzz::nonvanishing_dist(&mut rng, &g),
                fuzz::nonvanishing_dist(&mut rng, &g),
            )
        };
        let (c1, c2) = (dft(&m1), dft(&m2));
        if !eq2_exact(&c1, &c2, &dual)?.holds {
            continue;
        }
        eq2_passing += 1;
        if i < pairs {
            constructed_pass += 1;
        } else {
            random_pass += 1;
        }
        if decompose_finite(&c1, None)?.success && decompose_finite(&c2, None)?.success {
            factorised += 1;
        }
    }
    let verdict = cond1 && constructed_pass == pairs && factorised == eq2_passing;
    Ok(Outcome::plain(
        verdict,
        format!(
            "Z({}): condition1 {}, {} eq2-passing pairs ({} of {} random), {} factorise",
            g.order(),
            cond1,
            eq2_passing,
            random_pass,
            pairs,
            factorised
        ),
        json!({
            "level": level,
            "order": g.order(),
            "condition1": cond1,
            "two_torsion_order": two_torsion(&g).order(),
            "constructed_pairs": pairs,
            "constructed_passing": constructed_pass,
            "random_pairs": pairs,
            "random_passing": random_pass,
            "factorised": factorised,
        }),
    ))
}

fn oracle_fuzz(count: usize, max_order: usize, env: &CheckEnv) -> Result<Outcome, CliError> {
    let mut rng = stream_rng(env.seed, 0);
    let insts = fuzz::instances(&mut rng, count, max_order);
    let (mut agree, mut symmetric, mut eq5_checked, mut eq5_failed) = (0, 0, 0, 0);
    let mut first_disagreement = None;
    for (i, inst) in insts.iter().enumerate() {
        let (c1, c2, a) = (dft(&inst.mu1), dft(&inst.mu2), inst.alpha.adjoint());
        let eq2 = eq2_exact(&c1, &c2, &a)?;
        let sym = conditional_symmetry_exact(&inst.mu1, &inst.mu2, &inst.alpha)?;
        if eq2.holds == sym.symmetric {
            agree += 1;
        } else if first_disagreement.is_none() {
            first_disagreement = Some(i);
        }
        if eq2.holds {
            symmetric += 1;
            eq5_checked += 1;
            eq5_failed += usize::from(!eq5_exact(&c1, &c2, &a)?.holds);
        }
    }
    Ok(Outcome::plain(
        agree == count && eq5_failed == 0,
        format!(
            "{agree}/{count} agree ({symmetric} symmetric), eq5 holds on {}/{eq5_checked}",
            eq5_checked - eq5_failed
        ),
        json!({
            "instances": count,
            "agree": agree,
            "symmetric": symmetric,
            "first_disagreement": first_disagreement,
            "eq5_checked": eq5_checked,
            "eq5_failed": eq5_failed,
        }),
    ))
}

fn polynomial_fuzz(
    count: usize,
    max_n: u64,
    max_degree: usize,
    env: &CheckEnv,
) -> Result<Outcome, CliError> {
    if max_n < 2 {
        return Err(config("polynomial_fuzz needs max_n >= 2"));
    }
    let mut rng = stream_rng(env.seed, 0);
    let (mut rejected, mut constants) = (0, 0);
    for _ in 0..count {
        let n = rng.random_range(2..=max_n);
        let y = FiniteAbelianGroup::cyclic(n)?;
        let f = loop {
            let f = DualFunction::from_fn(&y, |_| rng.random_range(-1.0..1.0));
            if !f.is_constant(1e-6) {
                break f;
            }
        };
        rejected += usize::from((1..=max_degree).all(|deg| !is_polynomial(&f, deg)));
        let c = DualFunction::constant(&y, rng.random_range(-5.0..5.0));
        constants += usize::from((1..=max_degree).all(|deg| is_polynomial(&c, deg)));
    }
    Ok(Outcome::plain(
        rejected == count && constants == count,
        format!("{rejected}/{count} non-constant functions rejected, {constants}/{count} constants accepted"),
        json!({ "functions": count, "max_degree": max_degree, "rejected": rejected, "constants_accepted": constants }),
    ))
}

fn gaussian_phi(max_n: u64, trials: usize, env: &CheckEnv) -> Result<Outcome, CliError> {
    let mut rng = stream_rng(env.seed, 0);
    let mut dims = Vec::new();
    let mut accepted_nonzero = 0;
    for n in 2..=max_n {
        let y = FiniteAbelianGroup::cyclic(n)?;
        dims.push(quadratic_solution_dim(&y)?);
        if !gaussian_phi_check(&DualFunction::constant(&y, 0.0)) {
            return Err(CliError::Config("zero function rejected".into()));
        }
        for _ in 0..trials {
            let mut phi = DualFunction::from_fn(&y, |_| rng.random_range(0.0..1.0));
            if phi.max_abs() == 0.0 {
                phi = DualFunction::constant(&y, 1.0);
            }
            accepted_nonzero += usize::from(gaussian_phi_check(&phi));
        }
    }
    let verdict = dims.iter().all(|&d| d == 0) && accepted_nonzero == 0;
    Ok(Outcome::plain(
        verdict,
        format!("solution space dimensions {dims:?} on Z(2)..Z({max_n}), {accepted_nonzero} nonzero accepted"),
        json!({ "solution_dims": dims, "trials_per_group": trials, "nonzero_accepted": accepted_nonzero }),
    ))
}

fn pq_fuzz(count: usize, max_order: usize, env: &CheckEnv) -> Result<Outcome, CliError> {
    let mut rng = stream_rng(env.seed, 0);
    let insts = fuzz::condition1_eq2_instances(&mut rng, count, max_order);
    let (mut worst, mut eq6, mut nontrivial) = (0.0f64, 0.0f64, 0);
    for inst in &insts {
        let (c1, c2, a) = (dft(&inst.mu1), dft(&inst.mu2), inst.alpha.adjoint());
        let psi1 = psi_from(&c1)?;
        let psi2 = psi_from(&c2)?;
        nontrivial += usize::from(psi1.max_abs() > 1e-6);
        let r = verify_pq(&psi1, &psi2, &a)?;
        worst = worst.max(r.p_residual).max(r.q_residual);
        eq6 = eq6.max(r.eq6_residual);
    }
    Ok(Outcome {
        verdict: worst < env.tolerance,
        summary: format!(
            "{count} instances, max third difference {worst:.3e}, {nontrivial} with nonzero psi"
        ),
        max_residual: Some(worst),
        p_value: None,
        witness: None,
        detail: json!({
            "instances": count,
            "max_third_difference": worst,
            "max_eq6_residual": eq6,
            "nonzero_psi": nontrivial,
        }),
    })
}

pub fn default_tolerance() -> f64 {
    heyde_core::heyde::exact::EQ_TOL
}
