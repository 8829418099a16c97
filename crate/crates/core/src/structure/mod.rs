//! Finite differences, polynomials on dual groups, the functionals `P` and
//! `Q`, support localisation, the Gaussian functional equation, and the
//! factorisation `mu = gamma * omega * E_x`.

pub mod decompose;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dist::{dft, FiniteCharFn, FiniteDist};
use crate::error::{Error, Result};
use crate::group::{annihilator, multiples, FiniteAbelianGroup, Homomorphism, Subgroup};
use crate::heyde::GridSpec;

pub use decompose::{decompose, decompose_finite, Certificate, DecomposeStep, Decomposition};

/// Tolerance for vanishing of differences and functional equations.
pub const DIFF_TOL: f64 = 1e-9;

/// A real function on a finite dual group, indexed like its elements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualFunction {
    #[serde(skip)]
    dual: FiniteAbelianGroup,
    values: Vec<f64>,
}

impl DualFunction {
    pub fn new(dual: &FiniteAbelianGroup, values: Vec<f64>) -> Result<Self> {
        if values.len() != dual.order() {
            return Err(Error::structural(format!(
                "{} values for a dual group of order {}",
                values.len(),
                dual.order()
            )));
        }
        Ok(Self {
            dual: dual.clone(),
            values,
        })
    }

    pub fn constant(dual: &FiniteAbelianGroup, c: f64) -> Self {
        Self {
            dual: dual.clone(),
            values: vec![c; dual.order()],
        }
    }

    pub fn from_fn(dual: &FiniteAbelianGroup, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            dual: dual.clone(),
            values: (0..dual.order()).map(f).collect(),
        }
    }

    pub fn dual(&self) -> &FiniteAbelianGroup {
        &self.dual
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, y: usize) -> f64 {
        self.values[y]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_on(&self, sub: &Subgroup) -> f64 {
        sub.indices()
            .iter()
            .fold(0.0, |m, &y| m.max(self.values[y].abs()))
    }

    pub fn is_constant(&self, tol: f64) -> bool {
        self.values
            .iter()
            .all(|v| (v - self.values[0]).abs() <= tol)
    }
}

/// `(Delta_h f)(y) = f(y + h) - f(y)`.
pub fn finite_difference(f: &DualFunction, h: usize) -> DualFunction {
    let y = &f.dual;
    DualFunction::from_fn(y, |u| f.values[y.add_idx(u, h)] - f.values[u])
}

/// `Delta_h^n f`.
pub fn difference_power(f: &DualFunction, h: usize, n: usize) -> DualFunction {
    (0..n).fold(f.clone(), |g, _| finite_difference(&g, h))
}

/// `Delta_h^n f == 0` for every `h` in the dual.
pub fn is_polynomial(f: &DualFunction, n: usize) -> bool {
    (0..f.dual.order()).all(|h| difference_power(f, h, n).max_abs() <= DIFF_TOL)
}

/// `psi = -log |c|^2`. Fails if `|c|` vanishes somewhere; `psi >= 0` when
/// `|c| <= 1`.
pub fn psi_from(c: &FiniteCharFn) -> Result<DualFunction> {
    let mut values = Vec::with_capacity(c.dual().order());
    for (y, v) in c.values().iter().enumerate() {
        let nu = v.norm_sqr();
        if !(nu > 0.0) {
            return Err(Error::domain(format!(
                "characteristic function vanishes at {}",
                c.dual().from_index(y)
            )));
        }
        values.push(-nu.ln());
    }
    DualFunction::new(c.dual(), values)
}

/// `P(y) = psi1((I + a) y) + psi2(2 a y)`, `Q(y) = psi1(2 y) + psi2((I + a) y)`.
pub fn build_pq(
    psi1: &DualFunction,
    psi2: &DualFunction,
    alpha_dual: &Homomorphism,
) -> Result<(DualFunction, DualFunction)> {
    let y = &psi1.dual;
    if psi2.dual != *y || alpha_dual.source() != y || !alpha_dual.is_endomorphism() {
        return Err(Error::structural(
            "psi functions and automorphism on different groups",
        ));
    }
    let a = alpha_dual.table();
    let p = DualFunction::from_fn(y, |u| {
        psi1.values[y.add_idx(u, a[u])] + psi2.values[y.add_idx(a[u], a[u])]
    });
    let q = DualFunction::from_fn(y, |u| {
        psi1.values[y.add_idx(u, u)] + psi2.values[y.add_idx(u, a[u])]
    });
    Ok((p, q))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PqReport {
    pub holds: bool,
    /// `max |Delta_h^3 P(y)|` over `y, h` in `Y^(2)`.
    pub p_residual: f64,
    pub q_residual: f64,
    /// `max |psi1((I+a)u + 2v) + psi2(2au + (I+a)v) - P(u) - Q(v)|` over all `u, v`.
    pub eq6_residual: f64,
}

/// The third differences of `P` and `Q` along `Y^(2) = 2Y`, evaluated at
/// points of `Y^(2)`.
pub fn verify_pq(
    psi1: &DualFunction,
    psi2: &DualFunction,
    alpha_dual: &Homomorphism,
) -> Result<PqReport> {
    let (p, q) = build_pq(psi1, psi2, alpha_dual)?;
    let y = &psi1.dual;
    y.ensure_pairs("verify_pq")?;
    let y2 = multiples(y, 2);
    let third = |f: &DualFunction| {
        y2.indices().iter().fold(0.0f64, |m, &h| {
            let d = difference_power(f, h, 3);
            m.max(d.max_abs_on(&y2))
        })
    };
    let p_residual = third(&p);
    let q_residual = third(&q);
    let a = alpha_dual.table();
    let mut eq6 = 0.0f64;
    for u in 0..y.order() {
        let ipa_u = y.add_idx(u, a[u]);
        let two_au = y.add_idx(a[u], a[u]);
        for v in 0..y.order() {
            let lhs = psi1.values[y.add_idx(ipa_u, y.add_idx(v, v))]
                + psi2.values[y.add_idx(two_au, y.add_idx(v, a[v]))];
            eq6 = eq6.max((lhs - p.values[u] - q.values[v]).abs());
        }
    }
    Ok(PqReport {
        holds: p_residual <= DIFF_TOL && q_residual <= DIFF_TOL,
        p_residual,
        q_residual,
        eq6_residual: eq6,
    })
}

/// Whether `mu_hat == 1` on the subgroup `h` of the dual. When it is, the
/// support of `mu` is checked to lie in the annihilator `A(X, H)`; a
/// violation of that implication is reported as a validation error.
pub fn support_localize(mu: &FiniteDist, h: &Subgroup) -> Result<bool> {
    let x = mu.group();
    if h.parent().moduli() != x.moduli() {
        return Err(Error::structural(
            "subgroup does not live in the dual of the distribution's group",
        ));
    }
    let c = dft(mu);
    let one_on_h = h
        .indices()
        .iter()
        .all(|&y| (c.value(y) - 1.0).norm() <= DIFF_TOL);
    if one_on_h {
        let ann = annihilator(x, h)?;
        if let Some(bad) = mu.support().into_iter().find(|&i| !ann.contains_idx(i)) {
            return Err(Error::validation(format!(
                "characteristic function is 1 on H but {} lies outside A(X, H)",
                x.from_index(bad)
            )));
        }
    }
    Ok(one_on_h)
}

/// `phi(u + v) + phi(u - v) = 2 [phi(u) + phi(v)]` for all `u, v` in the dual.
pub fn gaussian_phi_check(phi: &DualFunction) -> bool {
    let y = &phi.dual;
    let f = &phi.values;
    (0..y.order()).all(|u| {
        (0..y.order()).all(|v| {
            (f[y.add_idx(u, v)] + f[y.sub_idx(u, v)] - 2.0 * (f[u] + f[v])).abs() <= DIFF_TOL
        })
    })
}

/// The same functional equation on a grid of `R^d`.
pub fn gaussian_phi_check_grid(
    phi: impl Fn(&[f64]) -> f64,
    d: usize,
    grid: &GridSpec,
) -> Result<bool> {
    let pts = grid.points(d)?;
    let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
    let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();
    Ok(pts.iter().all(|u| {
        pts.iter().all(|v| {
            let r = phi(&add(u, v)) + phi(&sub(u, v)) - 2.0 * (phi(u) + phi(v));
            r.abs() <= DIFF_TOL * (1.0 + phi(u).abs() + phi(v).abs())
        })
    }))
}

/// Dimension of the space of all real solutions of the Gaussian functional
/// equation on a finite dual, by exact elimination of the linear system.
pub fn quadratic_solution_dim(dual: &FiniteAbelianGroup) -> Result<usize> {
    dual.ensure_pairs("quadratic_solution_dim")?;
    let n = dual.order();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let mut row = vec![0i64; n];
            row[dual.add_idx(u, v)] += 1;
            row[dual.sub_idx(u, v)] += 1;
            row[u] -= 2;
            row[v] -= 2;
            if row.iter().any(|&c| c != 0) {
                rows.push(
                    row.into_iter()
                        .map(|c| BigRational::from_integer(BigInt::from(c)))
                        .collect(),
                );
            }
        }
    }
    Ok(n - rank(rows, n))
}

fn rank(mut rows: Vec<Vec<BigRational>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = &rows[i][c] / &pivot;
                for k in c..cols {
                    let delta = &factor * &rows[r][k];
                    rows[i][k] -= delta;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    debug_assert!(rows[r..]
        .iter()
        .all(|row| row.iter().all(|x| x.abs().is_zero())));
    r
}
