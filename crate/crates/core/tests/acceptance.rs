//! Acceptance criteria, run in sequence so that the runtime bounds are
//! measured without competing tests. Each criterion prints one line.

use std::time::{Duration, Instant};

use heyde_core::dist::{pd_check_gauss, stream_rng};
use heyde_core::extended::{solenoid_condition1, RealExtGroup};
use heyde_core::fuzz;
use heyde_core::heyde::{
    conditional_symmetry_exact, conditional_symmetry_mc, eq2_exact, eq2_grid, eq2_solenoid,
    eq5_exact, McConfig, SolenoidGrid,
};
use heyde_core::structure::{
    decompose, gaussian_phi_check, is_polynomial, psi_from, quadratic_solution_dim, verify_pq,
    DecomposeStep, DualFunction,
};
use heyde_core::*;
use rand::Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(2024, 0);
    let insts = fuzz::instances(&mut rng, 100, 64);
    let mut passing = 0;
    for (i, inst) in insts.iter().enumerate() {
        let eq2 = eq2_exact(&dft(&inst.mu1), &dft(&inst.mu2), &inst.alpha.adjoint())
            .map_err(|e| e.to_string())?;
        let sym = conditional_symmetry_exact(&inst.mu1, &inst.mu2, &inst.alpha)
            .map_err(|e| e.to_string())?;
        ensure(
            eq2.holds == sym.symmetric,
            format!(
                "instance {i} on {}: eq2 {} vs symmetry {}",
                inst.group(),
                eq2.holds,
                sym.symmetric
            ),
        )?;
        passing += usize::from(eq2.holds);
    }
    ensure(
        passing > 0 && passing < insts.len(),
        format!("degenerate mix: {passing} passing"),
    )?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "100/100 agree ({passing} symmetric, {} not) in {:?}",
        100 - passing,
        start.elapsed()
    ))
}

fn eq5_implication() -> Outcome {
    let mut rng = stream_rng(2024, 0);
    let mut insts = fuzz::instances(&mut rng, 100, 64);
    let mut rng = stream_rng(2025, 0);
    insts.extend(fuzz::instances(&mut rng, 100, 64));
    let mut checked = 0;
    for inst in &insts {
        let (c1, c2, a) = (dft(&inst.mu1), dft(&inst.mu2), inst.alpha.adjoint());
        if eq2_exact(&c1, &c2, &a).map_err(|e| e.to_string())?.holds {
            let r = eq5_exact(&c1, &c2, &a).map_err(|e| e.to_string())?;
            ensure(
                r.holds,
                format!(
                    "eq5 fails on {} with residual {}",
                    inst.group(),
                    r.max_residual
                ),
            )?;
            checked += 1;
        }
    }
    ensure(checked > 0, "no eq2-passing instances")?;
    Ok(format!("{checked} eq2-passing instances, all pass eq5"))
}

fn plane_gaussian_pair() -> Outcome {
    let start = Instant::now();
    let c1 = FourierGaussCharFn::quad_gauss(vec![4.0, 2.0, 2.0, 2.0], vec![0.0, 0.0])
        .map_err(|e| e.to_string())?;
    let c2 = FourierGaussCharFn::quad_gauss(vec![2.0, 1.0, 1.0, 1.0], vec![0.0, 0.0])
        .map_err(|e| e.to_string())?;
    let g = RealExtGroup::real(2).map_err(|e| e.to_string())?;
    let alpha = RealExtAutomorphism::new(
        &g,
        vec![-2.0, 0.0, 0.0, -2.0],
        Homomorphism::identity(g.finite()),
    )
    .map_err(|e| e.to_string())?;
    let r = eq2_grid(&c1, &c2, &alpha, &GridSpec::default()).map_err(|e| e.to_string())?;
    ensure(
        r.max_residual < 1e-9,
        format!("eq2 residual {}", r.max_residual),
    )?;
    let mut cross = Vec::new();
    for c in [&c1, &c2] {
        let d = decompose(c, None, &GridSpec::default()).map_err(|e| e.to_string())?;
        ensure(!d.success, "decompose succeeded")?;
        let ct = d
            .certificate
            .cross_term
            .ok_or("no cross-term certificate")?;
        ensure(ct.abs() > 0.5, format!("cross term {ct}"))?;
        cross.push(ct);
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "eq2 residual {:.1e}, decompose fails with cross terms {:.3}, {:.3}",
        r.max_residual, cross[0], cross[1]
    ))
}

fn remark_pair() -> Result<(FourierGaussCharFn, FourierGaussCharFn, RealExtAutomorphism)> {
    let c1 = FourierGaussCharFn::remark31_family(2.0, 1.0, 0.5)?;
    let c2 = FourierGaussCharFn::remark31_family(1.0, 0.5, 0.5)?;
    let alpha = RealExtAutomorphism::scalar(
        c1.group(),
        -2.0,
        Homomorphism::identity(c1.group().finite()),
    )?;
    Ok((c1, c2, alpha))
}

fn real_ext_counterexample() -> Outcome {
    let start = Instant::now();
    let (c1, c2, alpha) = remark_pair().map_err(|e| e.to_string())?;
    ensure(
        !alpha.condition1().map_err(|e| e.to_string())?,
        "condition1 holds",
    )?;
    let r = eq2_grid(&c1, &c2, &alpha, &GridSpec::default()).map_err(|e| e.to_string())?;
    ensure(
        r.max_residual < 1e-9,
        format!("eq2 residual {}", r.max_residual),
    )?;
    let grid = GridSpec::default().points(1).map_err(|e| e.to_string())?;
    for c in [&c1, &c2] {
        let pd = pd_check_gauss(c, &grid);
        ensure(
            pd.holds,
            format!("positive definiteness violated by {}", pd.max_violation),
        )?;
        let d = decompose(c, None, &GridSpec::default()).map_err(|e| e.to_string())?;
        ensure(
            d.certificate.failed_step == Some(DecomposeStep::ProductForm),
            format!("decompose failed at {:?}", d.certificate.failed_step),
        )?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "condition1 false, eq2 residual {:.1e}, pd holds, decompose fails at product form",
        r.max_residual
    ))
}

fn roundtrip_factorization() -> Outcome {
    let mut rng = stream_rng(77, 0);
    let finite = [vec![2], vec![2, 2], vec![2, 3]];
    let mut worst = 0.0f64;
    for i in 0..25 {
        let f = FiniteAbelianGroup::new(finite[i % 3].clone()).map_err(|e| e.to_string())?;
        let group = RealExtGroup::new(1, f.clone()).map_err(|e| e.to_string())?;
        let alpha_g = fuzz::random_automorphism(&mut rng, &f);
        let a = -[0.5, 1.0, 2.0, 3.0][rng.random_range(0..4)];
        let sigma2 = rng.random_range(0.2..1.5);
        let b2 = rng.random_range(-1.0..1.0);
        let (sigma1, b1) = (-a * sigma2, -a * b2);
        let (w1, w2) = fuzz::eq2_pair(&mut rng, &alpha_g);
        // w_j = omega_j * E_{x_j} with omega_j on the 2-torsion subgroup
        let build = |sigma: f64, b: f64, w: &FiniteDist| {
            FourierGaussCharFn::product_law(&group, vec![sigma], vec![b], w, &f.zero())
        };
        let c1 = build(sigma1, b1, &w1).map_err(|e| e.to_string())?;
        let c2 = build(sigma2, b2, &w2).map_err(|e| e.to_string())?;
        let alpha =
            RealExtAutomorphism::scalar(&group, a, alpha_g.clone()).map_err(|e| e.to_string())?;
        let r = eq2_grid(&c1, &c2, &alpha, &GridSpec::default()).map_err(|e| e.to_string())?;
        ensure(
            r.holds,
            format!("construction {i}: eq2 residual {}", r.max_residual),
        )?;
        for (c, sigma) in [(&c1, sigma1), (&c2, sigma2)] {
            let d = decompose(c, None, &GridSpec::default()).map_err(|e| e.to_string())?;
            ensure(
                d.success,
                format!(
                    "construction {i}: failed at {:?}",
                    d.certificate.failed_step
                ),
            )?;
            worst = worst.max((d.sigma - sigma).abs());
        }
    }
    ensure(worst < 1e-9, format!("sigma error {worst}"))?;
    Ok(format!(
        "25/25 pass eq2 and decompose, max |sigma_fit - sigma| = {worst:.1e}"
    ))
}

fn finite_polynomials_constant() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(5, 0);
    for i in 0..50 {
        let n = rng.random_range(2..=12u64);
        let y = FiniteAbelianGroup::cyclic(n).map_err(|e| e.to_string())?;
        let f = loop {
            let f = DualFunction::from_fn(&y, |_| rng.random_range(-1.0..1.0));
            if !f.is_constant(1e-6) {
                break f;
            }
        };
        for deg in 1..=4 {
            ensure(
                !is_polynomial(&f, deg),
                format!("function {i} on Z({n}) passes degree {deg}"),
            )?;
        }
        let c = DualFunction::constant(&y, rng.random_range(-5.0..5.0));
        for deg in 1..=4 {
            ensure(
                is_polynomial(&c, deg),
                format!("constant on Z({n}) fails degree {deg}"),
            )?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "50 non-constant functions rejected, constants accepted, {:?}",
        start.elapsed()
    ))
}

fn pq_third_differences() -> Outcome {
    let mut rng = stream_rng(8, 0);
    let insts = fuzz::condition1_eq2_instances(&mut rng, 20, 64);
    let mut worst = 0.0f64;
    let mut nontrivial = 0;
    for inst in &insts {
        let (c1, c2, a) = (dft(&inst.mu1), dft(&inst.mu2), inst.alpha.adjoint());
        ensure(
            eq2_exact(&c1, &c2, &a).map_err(|e| e.to_string())?.holds,
            "instance fails eq2",
        )?;
        let psi1 = psi_from(&c1).map_err(|e| e.to_string())?;
        let psi2 = psi_from(&c2).map_err(|e| e.to_string())?;
        nontrivial += usize::from(psi1.max_abs() > 1e-6);
        let r = verify_pq(&psi1, &psi2, &a).map_err(|e| e.to_string())?;
        ensure(
            r.holds,
            format!(
                "third differences {} / {} on {}",
                r.p_residual,
                r.q_residual,
                inst.group()
            ),
        )?;
        worst = worst.max(r.p_residual).max(r.q_residual);
    }
    ensure(worst < 1e-9, format!("residual {worst}"))?;
    Ok(format!(
        "20/20 instances, max residual {worst:.1e}, {nontrivial} with nonzero psi"
    ))
}

fn finite_gaussians_degenerate() -> Outcome {
    let mut rng = stream_rng(9, 0);
    for n in 2..=12u64 {
        let y = FiniteAbelianGroup::cyclic(n).map_err(|e| e.to_string())?;
        let dim = quadratic_solution_dim(&y).map_err(|e| e.to_string())?;
        ensure(
            dim == 0,
            format!("Z({n}) has a {dim}-dimensional solution space"),
        )?;
        ensure(
            gaussian_phi_check(&DualFunction::constant(&y, 0.0)),
            "zero function rejected",
        )?;
        for _ in 0..20 {
            let mut phi = DualFunction::from_fn(&y, |_| rng.random_range(0.0..1.0));
            if phi.max_abs() == 0.0 {
                phi = DualFunction::constant(&y, 1.0);
            }
            ensure(
                !gaussian_phi_check(&phi),
                format!("nonzero phi on Z({n}) accepted"),
            )?;
        }
    }
    Ok("only phi = 0 solves the equation on Z(n), n = 2..12".into())
}

fn monte_carlo_symmetry() -> Outcome {
    let start = Instant::now();
    let (c1, c2, alpha) = remark_pair().map_err(|e| e.to_string())?;
    let cfg = McConfig {
        samples: 1_000_000,
        bins: 32,
        seed: 20240601,
        workers: 4,
    };
    let good = conditional_symmetry_mc(&c1, &c2, &alpha, &cfg).map_err(|e| e.to_string())?;
    let bad_c1 = FourierGaussCharFn::remark31_family(2.0, 1.5, 0.5).map_err(|e| e.to_string())?;
    let bad = conditional_symmetry_mc(&bad_c1, &c2, &alpha, &cfg).map_err(|e| e.to_string())?;
    ensure(
        good.p_value > 0.01,
        format!("symmetric instance p = {}", good.p_value),
    )?;
    ensure(
        bad.p_value < 0.01,
        format!("perturbed instance p = {}", bad.p_value),
    )?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "p = {:.3} (symmetric), p = {:.1e} (perturbed), df {} / {}, {:?}",
        good.p_value,
        bad.p_value,
        good.degrees_of_freedom,
        bad.degrees_of_freedom,
        start.elapsed()
    ))
}

fn solenoid_checks() -> Outcome {
    let spec = SolenoidSpec::new(vec![2, 3], [2, 3]).map_err(|e| e.to_string())?;
    let grid = SolenoidGrid::default();
    let third = SolenoidAutomorphism::new(&spec, 1, 3).map_err(|e| e.to_string())?;
    ensure(
        solenoid_condition1(&spec, &third),
        "condition1 fails for 1/3",
    )?;
    // a = 1/3 > 0 forces sigma1 = sigma2 = 0; the relation t1 + a t2 = 0 remains
    let c1 = SolenoidGaussCharFn::new(-0.2, 0.0).map_err(|e| e.to_string())?;
    let c2 = SolenoidGaussCharFn::new(0.6, 0.0).map_err(|e| e.to_string())?;
    let r = eq2_solenoid(&c1, &c2, &spec, &third, &grid).map_err(|e| e.to_string())?;
    ensure(
        r.max_residual < 1e-9,
        format!("1/3 pair residual {}", r.max_residual),
    )?;
    // a = -1/3 admits nondegenerate pairs: sigma1 = sigma2 / 3
    let neg = SolenoidAutomorphism::new(&spec, -1, 3).map_err(|e| e.to_string())?;
    ensure(
        solenoid_condition1(&spec, &neg),
        "condition1 fails for -1/3",
    )?;
    let d1 = SolenoidGaussCharFn::new(0.1, 0.5).map_err(|e| e.to_string())?;
    let d2 = SolenoidGaussCharFn::new(0.3, 1.5).map_err(|e| e.to_string())?;
    let r2 = eq2_solenoid(&d1, &d2, &spec, &neg, &grid).map_err(|e| e.to_string())?;
    ensure(
        r2.max_residual < 1e-9,
        format!("-1/3 pair residual {}", r2.max_residual),
    )?;
    let off = SolenoidGaussCharFn::new(0.3, 1.0).map_err(|e| e.to_string())?;
    ensure(
        !eq2_solenoid(&d1, &off, &spec, &neg, &grid)
            .map_err(|e| e.to_string())?
            .holds,
        "control pair passes",
    )?;
    let two_thirds = SolenoidAutomorphism::new(&spec, 2, 3).map_err(|e| e.to_string())?;
    ensure(
        !solenoid_condition1(&spec, &two_thirds),
        "condition1 holds for 2/3",
    )?;
    let ev = spec.kernel_evidence(5, 3).map_err(|e| e.to_string())?;
    ensure(
        ev.solenoid_kernel_order == 5,
        format!("kernel order {}", ev.solenoid_kernel_order),
    )?;
    Ok(format!(
        "1/3: condition1, residual {:.1e}; -1/3: residual {:.1e}; 2/3: |Ker(I + alpha)| = {} at level {}",
        r.max_residual, r2.max_residual, ev.solenoid_kernel_order, ev.level
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (
            "eq2 agrees with exact conditional symmetry",
            oracle_equivalence,
        ),
        ("eq2 implies eq5", eq5_implication),
        ("Gaussian pair on R^2 with alpha = -2I", plane_gaussian_pair),
        ("non-Gaussian pair on R x Z(2)", real_ext_counterexample),
        ("factorisation round trip on R x F", roundtrip_factorization),
        (
            "polynomials on Z(n) are constant",
            finite_polynomials_constant,
        ),
        ("third differences of P and Q vanish", pq_third_differences),
        (
            "Gaussian functional equation on Z(n)",
            finite_gaussians_degenerate,
        ),
        ("Monte Carlo conditional symmetry", monte_carlo_symmetry),
        ("solenoid condition1 and eq2", solenoid_checks),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
