//! Grid checks on `R^d x F` and on solenoids.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ResidualReport;
use crate::dist::{FourierGaussCharFn, SolenoidGaussCharFn};
use crate::error::{Error, Result};
use crate::extended::{
    RealExtAutomorphism, SolenoidAutomorphism, SolenoidDualElement, SolenoidSpec,
};

/// Tolerance of the grid checks.
pub const GRID_TOL: f64 = 1e-9;
/// Upper bound on `(u, v)` pairs visited by a grid check.
pub const GRID_PAIR_BOUND: u128 = 1 << 26;

/// Points `lo, lo + step, ..., hi` on each real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo: -4.0,
            hi: 4.0,
            step: 0.25,
        }
    }
}

impl GridSpec {
    pub fn axis(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.hi >= self.lo) {
            return Err(Error::domain(format!("bad grid {self:?}")));
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.lo + i as f64 * self.step).collect())
    }

    /// All points of `axis^d`.
    pub fn points(&self, d: usize) -> Result<Vec<Vec<f64>>> {
        let axis = self.axis()?;
        let mut pts = vec![Vec::new()];
        for _ in 0..d {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Ok(pts)
    }
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(k: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| k * x).collect()
}

struct Domain {
    points: Vec<(Vec<f64>, usize)>,
}

impl Domain {
    fn new(
        c1: &FourierGaussCharFn,
        c2: &FourierGaussCharFn,
        alpha: &RealExtAutomorphism,
        grid: &GridSpec,
    ) -> Result<Self> {
        if c1.group() != c2.group() || alpha.group() != c1.group() {
            return Err(Error::structural(
                "functions and automorphism on different groups",
            ));
        }
        let f = c1.group().finite();
        let pts = grid.points(c1.group().real_dim())?;
        let points: Vec<_> = pts
            .iter()
            .flat_map(|s| (0..f.order()).map(move |h| (s.clone(), h)))
            .collect();
        let pairs = (points.len() as u128).pow(2);
        if pairs > GRID_PAIR_BOUND {
            return Err(Error::capacity("grid check", pairs, GRID_PAIR_BOUND));
        }
        Ok(Self { points })
    }

    fn sweep<F>(&self, residual: F, fmt: impl Fn(&(Vec<f64>, usize)) -> String) -> ResidualReport
    where
        F: Fn(&(Vec<f64>, usize), &(Vec<f64>, usize)) -> f64 + Sync,
    {
        let n = self.points.len();
        let (max, at) = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| (residual(&self.points[i], &self.points[j]), (i, j)))
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
            GRID_TOL,
            n * n,
            (fmt(&self.points[at.0]), fmt(&self.points[at.1])),
        )
    }
}

fn fmt_point(c: &FourierGaussCharFn) -> impl Fn(&(Vec<f64>, usize)) -> String + '_ {
    move |(s, h)| {
        let s: Vec<String> = s.iter().map(|x| format!("{x}")).collect();
        format!(
            "(s=[{}], h={})",
            s.join(","),
            c.group().finite().from_index(*h)
        )
    }
}

/// The eq2 residual on `R^d x F`, with `alpha(t, g) = (A t, alpha_G g)` acting
/// on the dual as `(s, h) -> (A^T s, alpha_G~ h)`.
pub fn eq2_grid(
    c1: &FourierGaussCharFn,
    c2: &FourierGaussCharFn,
    alpha: &RealExtAutomorphism,
    grid: &GridSpec,
) -> Result<ResidualReport> {
    let dom = Domain::new(c1, c2, alpha, grid)?;
    let f = c1.group().finite();
    let ag = alpha.finite().adjoint().table();
    Ok(dom.sweep(
        |(s1, h1), (s2, h2)| {
            let as2 = alpha.adjoint_real(s2);
            let ah2 = ag[*h2];
            let lhs = c1.eval(&add(s1, s2), f.add_idx(*h1, *h2))
                * c2.eval(&add(s1, &as2), f.add_idx(*h1, ah2));
            let rhs = c1.eval(&sub(s1, s2), f.sub_idx(*h1, *h2))
                * c2.eval(&sub(s1, &as2), f.sub_idx(*h1, ah2));
            (lhs - rhs).norm()
        },
        fmt_point(c1),
    ))
}

/// The eq5 residual on the same grid.
pub fn eq5_grid(
    c1: &FourierGaussCharFn,
    c2: &FourierGaussCharFn,
    alpha: &RealExtAutomorphism,
    grid: &GridSpec,
) -> Result<ResidualReport> {
    let dom = Domain::new(c1, c2, alpha, grid)?;
    let f = c1.group().finite();
    let ag = alpha.finite().adjoint().table();
    Ok(dom.sweep(
        |(s, h), (t, k)| {
            // (I + a) u, 2 a u, 2 v, (I + a) v
            let ipa_u = (add(s, &alpha.adjoint_real(s)), f.add_idx(*h, ag[*h]));
            let two_au = (
                scale(2.0, &alpha.adjoint_real(s)),
                f.add_idx(ag[*h], ag[*h]),
            );
            let two_v = (scale(2.0, t), f.add_idx(*k, *k));
            let ipa_v = (add(t, &alpha.adjoint_real(t)), f.add_idx(*k, ag[*k]));
            let lhs = c1.eval(&add(&ipa_u.0, &two_v.0), f.add_idx(ipa_u.1, two_v.1))
                * c2.eval(&add(&two_au.0, &ipa_v.0), f.add_idx(two_au.1, ipa_v.1));
            let rhs: Complex64 = c1.eval(&ipa_u.0, ipa_u.1)
                * c2.eval(&two_au.0, two_au.1)
                * c1.eval(&two_v.0, two_v.1)
                * c2.eval(&ipa_v.0, ipa_v.1);
            (lhs - rhs).norm()
        },
        fmt_point(c1),
    ))
}

/// Dual elements used by the solenoid checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolenoidGrid {
    pub max_level: usize,
    pub radius: f64,
}

impl Default for SolenoidGrid {
    fn default() -> Self {
        Self {
            max_level: 3,
            radius: 4.0,
        }
    }
}

/// The eq2 residual on a solenoid, over all pairs of dual elements of level
/// at most `grid.max_level` and absolute value at most `grid.radius`.
pub fn eq2_solenoid(
    c1: &SolenoidGaussCharFn,
    c2: &SolenoidGaussCharFn,
    spec: &SolenoidSpec,
    alpha: &SolenoidAutomorphism,
    grid: &SolenoidGrid,
) -> Result<ResidualReport> {
    let elems = spec.dual_elements(grid.max_level, grid.radius)?;
    let pairs = (elems.len() as u128).pow(2);
    if pairs > GRID_PAIR_BOUND {
        return Err(Error::capacity(
            "solenoid grid check",
            pairs,
            GRID_PAIR_BOUND,
        ));
    }
    let a = alpha.as_rational();
    let n = elems.len();
    let at = |r| -> Result<SolenoidDualElement> { spec.dual_element(r) };
    let results: Result<Vec<(f64, (usize, usize))>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let u = elems[i].value();
            let mut best = (0.0f64, (i, 0));
            for (j, v) in elems.iter().enumerate() {
                let v = v.value();
                let av = v * &a;
                let lhs = c1.eval(&at(u + v)?) * c2.eval(&at(u + &av)?);
                let rhs = c1.eval(&at(u - v)?) * c2.eval(&at(u - &av)?);
                let r = (lhs - rhs).norm();
                if r > best.0 {
                    best = (r, (i, j));
                }
            }
            Ok(best)
        })
        .collect();
    let (max, (i, j)) = results?
        .into_iter()
        .fold((0.0, (0, 0)), |a, b| if b.0 > a.0 { b } else { a });
    Ok(ResidualReport::new(
        max,
        GRID_TOL,
        n * n,
        (elems[i].value().to_string(), elems[j].value().to_string()),
    ))
}
