//! Exhaustive checks on finite groups.

use num_complex::Complex64;
use rayon::prelude::*;

use super::ResidualReport;
use crate::dist::{FiniteCharFn, FiniteDist};
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, Homomorphism};

/// Tolerance of the exhaustive equation checks.
pub const EQ_TOL: f64 = 1e-9;
/// Tolerance of the joint-law symmetry comparison.
pub const JOINT_TOL: f64 = 1e-12;

fn check_inputs(
    c1: &FiniteCharFn,
    c2: &FiniteCharFn,
    alpha_dual: &Homomorphism,
    what: &str,
) -> Result<()> {
    if c1.dual() != c2.dual() {
        return Err(Error::structural(format!(
            "characteristic functions on {} and {}",
            c1.dual(),
            c2.dual()
        )));
    }
    if alpha_dual.source() != c1.dual() || !alpha_dual.is_endomorphism() {
        return Err(Error::structural(format!(
            "automorphism acts on {}, functions live on {}",
            alpha_dual.source(),
            c1.dual()
        )));
    }
    if !alpha_dual.is_automorphism() {
        return Err(Error::domain("the dual map is not an automorphism"));
    }
    c1.dual().ensure_pairs(what)
}

/// Maximum of `|residual(u, v)|` over all pairs, in parallel over `u`.
fn sweep<F>(dual: &FiniteAbelianGroup, residual: F, tol: f64) -> ResidualReport
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let n = dual.order();
    let (max, at) = (0..n)
        .into_par_iter()
        .map(|u| {
            (0..n)
                .map(|v| (residual(u, v), (u, v)))
                .fold((0.0f64, (0, 0)), |a, b| if b.0 > a.0 { b } else { a })
        })
        .reduce(
            || (0.0, (0, 0)),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    ResidualReport::new(
        max,
        tol,
        n * n,
        (
            dual.from_index(at.0).to_string(),
            dual.from_index(at.1).to_string(),
        ),
    )
}

/// `c1(u + v) c2(u + a v) = c1(u - v) c2(u - a v)` for all `u, v` in the dual,
/// with `a` the adjoint automorphism acting on the dual.
pub fn eq2_exact(
    c1: &FiniteCharFn,
    c2: &FiniteCharFn,
    alpha_dual: &Homomorphism,
) -> Result<ResidualReport> {
    check_inputs(c1, c2, alpha_dual, "eq2_exact")?;
    let y = c1.dual();
    let a = alpha_dual.table();
    Ok(sweep(
        y,
        |u, v| {
            let av = a[v];
            let lhs = c1.value(y.add_idx(u, v)) * c2.value(y.add_idx(u, av));
            let rhs = c1.value(y.sub_idx(u, v)) * c2.value(y.sub_idx(u, av));
            (lhs - rhs).norm()
        },
        EQ_TOL,
    ))
}

/// `c1((I+a)u + 2v) c2(2a u + (I+a)v) = c1((I+a)u) c2(2a u) c1(2v) c2((I+a)v)`.
pub fn eq5_exact(
    c1: &FiniteCharFn,
    c2: &FiniteCharFn,
    alpha_dual: &Homomorphism,
) -> Result<ResidualReport> {
    check_inputs(c1, c2, alpha_dual, "eq5")?;
    let y = c1.dual();
    let a = alpha_dual.table();
    let ipa: Vec<usize> = (0..y.order()).map(|u| y.add_idx(u, a[u])).collect();
    Ok(sweep(
        y,
        |u, v| {
            let two_v = y.add_idx(v, v);
            let two_au = y.add_idx(a[u], a[u]);
            let lhs = c1.value(y.add_idx(ipa[u], two_v)) * c2.value(y.add_idx(two_au, ipa[v]));
            let rhs: Complex64 =
                c1.value(ipa[u]) * c2.value(two_au) * c1.value(two_v) * c2.value(ipa[v]);
            (lhs - rhs).norm()
        },
        EQ_TOL,
    ))
}

/// Exact joint law of `(L1, L2) = (xi1 + xi2, xi1 + alpha xi2)` as a dense
/// `order x order` table indexed `[l1 * order + l2]`.
pub fn joint_law(mu1: &FiniteDist, mu2: &FiniteDist, alpha: &Homomorphism) -> Result<Vec<f64>> {
    let g = mu1.group();
    if mu2.group() != g || alpha.source() != g || !alpha.is_endomorphism() {
        return Err(Error::structural(
            "distributions and automorphism on different groups",
        ));
    }
    g.ensure_pairs("cond_sym_exact")?;
    let n = g.order();
    let a = alpha.table();
    let mut p = vec![0.0; n * n];
    for x1 in mu1.support() {
        for x2 in mu2.support() {
            let l1 = g.add_idx(x1, x2);
            let l2 = g.add_idx(x1, a[x2]);
            p[l1 * n + l2] += mu1.prob(x1) * mu2.prob(x2);
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// `max |p(l1, l2) - p(l1, -l2)|`
    pub max_asymmetry: f64,
    pub witness: Option<(String, String)>,
}

/// Whether the conditional law of `L2` given `L1` is symmetric, decided from
/// the exact joint law: `p(l1, l2) = p(l1, -l2)` for every pair.
pub fn conditional_symmetry_exact(
    mu1: &FiniteDist,
    mu2: &FiniteDist,
    alpha: &Homomorphism,
) -> Result<SymmetryReport> {
    if !alpha.is_automorphism() {
        return Err(Error::domain("alpha is not an automorphism"));
    }
    let g = mu1.group();
    let n = g.order();
    let p = joint_law(mu1, mu2, alpha)?;
    let mut worst = (0.0f64, (0, 0));
    for l1 in 0..n {
        for l2 in 0..n {
            let d = (p[l1 * n + l2] - p[l1 * n + g.neg_idx(l2)]).abs();
            if d > worst.0 {
                worst = (d, (l1, l2));
            }
        }
    }
    let symmetric = worst.0 <= JOINT_TOL;
    Ok(SymmetryReport {
        symmetric,
        max_asymmetry: worst.0,
        witness: (!symmetric).then(|| {
            (
                g.from_index(worst.1 .0).to_string(),
                g.from_index(worst.1 .1).to_string(),
            )
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::dft;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    #[test]
    fn point_masses_at_zero() {
        for moduli in [vec![5], vec![2, 4], vec![3, 3]] {
            let g = FiniteAbelianGroup::new(moduli).unwrap();
            let e0 = FiniteDist::point(&g, &g.zero()).unwrap();
            let alpha = Homomorphism::identity(&g);
            let c = dft(&e0);
            assert!(eq2_exact(&c, &c, &alpha.adjoint()).unwrap().holds);
            assert!(eq5_exact(&c, &c, &alpha.adjoint()).unwrap().holds);
            assert!(
                conditional_symmetry_exact(&e0, &e0, &alpha)
                    .unwrap()
                    .symmetric
            );
        }
    }

    #[test]
    fn z5_nonuniform_pair_fails_both_ways() {
        let g = z(5);
        let mu = FiniteDist::new(&g, vec![0.4, 0.15, 0.15, 0.15, 0.15]).unwrap();
        let alpha = Homomorphism::scalar(&g, 2);
        let c = dft(&mu);
        let r = eq2_exact(&c, &c, &alpha.adjoint()).unwrap();
        assert!(!r.holds);
        // independent evaluation gives 0.1875 at (u, v) = (1, 1)
        assert!((r.max_residual - 0.1875).abs() < 1e-12);
        assert_eq!(r.witness, Some(("(1)".into(), "(1)".into())));
        let s = conditional_symmetry_exact(&mu, &mu, &alpha).unwrap();
        assert!(!s.symmetric);
        assert!((s.max_asymmetry - 0.0375).abs() < 1e-12);
    }

    #[test]
    fn two_torsion_pair_on_klein_group() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let alpha = Homomorphism::endomorphism(&g, vec![vec![0, 1], vec![1, 1]]).unwrap();
        let mu = FiniteDist::new(&g, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let c = dft(&mu);
        assert!(eq2_exact(&c, &c, &alpha.adjoint()).unwrap().holds);
        assert!(
            conditional_symmetry_exact(&mu, &mu, &alpha)
                .unwrap()
                .symmetric
        );
    }

    #[test]
    fn z3_with_f2_is_evaluated_without_condition1() {
        let g = z(3);
        let u = FiniteDist::uniform(&g);
        let alpha = Homomorphism::scalar(&g, 2);
        let c = dft(&u);
        let eq2 = eq2_exact(&c, &c, &alpha.adjoint()).unwrap().holds;
        let sym = conditional_symmetry_exact(&u, &u, &alpha)
            .unwrap()
            .symmetric;
        assert_eq!(eq2, sym);
        assert!(sym);
    }

    #[test]
    fn mismatched_groups() {
        let c3 = dft(&FiniteDist::uniform(&z(3)));
        let c4 = dft(&FiniteDist::uniform(&z(4)));
        let a = Homomorphism::identity(&z(3));
        assert!(matches!(eq2_exact(&c3, &c4, &a), Err(Error::Structural(_))));
        let a4 = Homomorphism::identity(&z(4));
        assert!(matches!(
            eq2_exact(&c3, &c3, &a4),
            Err(Error::Structural(_))
        ));
        let not_aut = Homomorphism::scalar(&z(4), 2);
        assert!(matches!(
            eq2_exact(&c4, &c4, &not_aut),
            Err(Error::Domain(_))
        ));
    }
}
