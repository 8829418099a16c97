//! Factorisation of a characteristic function on `R x F` as
//! `exp(-sigma s^2 + i b s) * omega_hat(h) * (g0, h)`, i.e. `mu = gamma * omega * E_(b, g0)`
//! with `omega` a law on the subgroup `G` of `F`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dist::{inverse_dft, FiniteCharFn, FourierGaussCharFn};
use crate::error::{Error, Result};
use crate::group::{annihilator, FiniteAbelianGroup, Subgroup};
use crate::heyde::GridSpec;

/// Tolerance of the fit and product-form checks.
pub const FIT_TOL: f64 = 1e-6;
/// Tolerance for `omega_hat` being real and for its inverse transform.
pub const MEASURE_TOL: f64 = 1e-9;
/// Points where `|c(s, 0)|` is below this are ignored by the fit.
pub const FIT_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecomposeStep {
    /// `c(s, 0) = exp(-sigma s^2 + i b s)` on the grid.
    FitGaussian,
    /// A shift `g0` making `omega_hat` real exists.
    FiniteShift,
    /// `c(s, h) = exp(-sigma s^2 + i b s) c(0, h)` on the grid.
    ProductForm,
    /// `omega_hat` is the transform of a law on `G`.
    SupportInG,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub fit_residual: f64,
    pub shift_residual: f64,
    pub product_residual: f64,
    /// Largest `|Im omega_hat|`.
    pub imag_residual: f64,
    /// Largest difference of `omega_hat` within a coset of `A(Y, G)`.
    pub coset_residual: f64,
    /// Largest negative mass or mass outside `G` of the inverse transform.
    pub support_residual: f64,
    pub failed_step: Option<DecomposeStep>,
    /// On `R^2`: the estimated coefficient of `s t` in `-log c(s, t) / 2`,
    /// which a product form would force to zero.
    pub cross_term: Option<f64>,
    pub grid_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub success: bool,
    pub sigma: f64,
    pub b: f64,
    pub omega_hat: Vec<f64>,
    /// The law `omega` on `F`, when it could be recovered.
    pub omega: Option<Vec<f64>>,
    /// The finite shift `g0`.
    pub shift: String,
    pub shift_coords: Vec<u64>,
    pub certificate: Certificate,
}

struct Fit {
    sigma: f64,
    b: f64,
    residual: f64,
}

/// Least squares through the origin: `log |c| = -sigma s^2` and the unwrapped
/// phase `arg c = b s`.
fn fit_gaussian(points: &[(f64, Complex64)]) -> Result<Fit> {
    let mut usable: Vec<(f64, Complex64)> = points
        .iter()
        .copied()
        .filter(|p| p.1.norm() > FIT_FLOOR)
        .collect();
    if usable.len() < 3 {
        return Err(Error::domain(
            "characteristic function vanishes on the fitting grid",
        ));
    }
    usable.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)));
    let (mut num, mut den) = (0.0, 0.0);
    for &(s, c) in &usable {
        num += s * s * c.norm().ln();
        den += s.powi(4);
    }
    let sigma = if den > 0.0 { -num / den } else { 0.0 };

    // unwrap outward from the origin on each side
    let mut phases = Vec::with_capacity(usable.len());
    for side in [1.0, -1.0] {
        let mut prev = 0.0;
        for &(s, c) in usable.iter().filter(|p| p.0 * side > 0.0) {
            let mut a = c.arg();
            while a - prev > std::f64::consts::PI {
                a -= std::f64::consts::TAU;
            }
            while a - prev < -std::f64::consts::PI {
                a += std::f64::consts::TAU;
            }
            phases.push((s, a));
            prev = a;
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &(s, a) in &phases {
        num += s * a;
        den += s * s;
    }
    let b = if den > 0.0 { num / den } else { 0.0 };
    let residual = points
        .iter()
        .map(|&(s, c)| (c - Complex64::from_polar((-sigma * s * s).exp(), b * s)).norm())
        .fold(0.0, f64::max);
    Ok(Fit { sigma, b, residual })
}

struct FinitePart {
    g0: usize,
    omega_hat: Vec<Complex64>,
    shift_residual: f64,
    imag_residual: f64,
    coset_residual: f64,
    support_residual: f64,
    omega: Option<Vec<f64>>,
}

impl FinitePart {
    fn passes(&self) -> bool {
        self.imag_residual <= MEASURE_TOL
            && self.coset_residual <= MEASURE_TOL
            && self.support_residual <= MEASURE_TOL
    }
}

fn finite_part(
    f: &FiniteAbelianGroup,
    g: &Subgroup,
    w: &[Complex64],
    g0: usize,
) -> Result<FinitePart> {
    let n = f.order();
    let omega_hat: Vec<Complex64> = (0..n).map(|h| w[h] * f.pairing_idx(g0, h).conj()).collect();
    let imag_residual = omega_hat.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    let ann = annihilator(f, g)?;
    let mut coset_residual = 0.0f64;
    for h in 0..n {
        for &k in ann.indices() {
            coset_residual = coset_residual.max((omega_hat[f.add_idx(h, k)] - omega_hat[h]).norm());
        }
    }
    let raw = inverse_dft(&FiniteCharFn::new(&f.dual(), omega_hat.clone())?);
    let mut support_residual = 0.0f64;
    for (x, v) in raw.iter().enumerate() {
        let bad = if g.contains_idx(x) {
            (-v.re).max(v.im.abs())
        } else {
            v.norm()
        };
        support_residual = support_residual.max(bad);
    }
    let omega =
        (support_residual <= MEASURE_TOL).then(|| raw.iter().map(|v| v.re.max(0.0)).collect());
    Ok(FinitePart {
        g0,
        omega_hat,
        shift_residual: imag_residual,
        imag_residual,
        coset_residual,
        support_residual,
        omega,
    })
}

/// Picks `g0` among all elements making `omega_hat` the transform of a law
/// on `G`; ties go to nonnegative `omega_hat` on the standard generators of
/// the dual, then to the smallest index. Falls back to `g0 = 0`.
fn choose_shift(f: &FiniteAbelianGroup, g: &Subgroup, w: &[Complex64]) -> Result<FinitePart> {
    let gens: Vec<usize> = (0..f.rank())
        .map(|i| {
            let mut c = vec![0i64; f.rank()];
            c[i] = 1;
            f.index_of(&f.element(&c).expect("unit vector"))
        })
        .collect();
    let mut best: Option<(bool, FinitePart)> = None;
    for g0 in 0..f.order() {
        let part = finite_part(f, g, w, g0)?;
        if !part.passes() {
            continue;
        }
        let nonneg = gens.iter().all(|&h| part.omega_hat[h].re >= -MEASURE_TOL);
        match &best {
            Some((b, _)) if *b || !nonneg => {}
            _ => best = Some((nonneg, part)),
        }
        if matches!(best, Some((true, _))) {
            break;
        }
    }
    match best {
        Some((_, part)) => Ok(part),
        None => finite_part(f, g, w, 0),
    }
}

/// Decomposes a characteristic function on `R x F` (or on `R^2`, where the
/// second coordinate takes the place of `F` and `G = {0}`).
///
/// `g` is the subgroup of `F` expected to carry `omega`, usually
/// [`crate::group::two_torsion`].
pub fn decompose(
    c: &FourierGaussCharFn,
    g: Option<&Subgroup>,
    grid: &GridSpec,
) -> Result<Decomposition> {
    match c.group().real_dim() {
        1 => decompose_real_ext(c, g, grid),
        2 if c.group().finite().order() == 1 => decompose_plane(c, grid),
        d => Err(Error::structural(format!(
            "decompose handles R x F and R^2, got real dimension {d} with |F| = {}",
            c.group().finite().order()
        ))),
    }
}

fn first_failure(steps: [(DecomposeStep, bool); 4]) -> Option<DecomposeStep> {
    steps.into_iter().find(|s| !s.1).map(|s| s.0)
}

fn decompose_real_ext(
    c: &FourierGaussCharFn,
    g: Option<&Subgroup>,
    grid: &GridSpec,
) -> Result<Decomposition> {
    let f = c.group().finite();
    let g = match g {
        Some(g) if g.parent() != f => {
            return Err(Error::structural("G is not a subgroup of the finite part"))
        }
        Some(g) => g.clone(),
        None => crate::group::two_torsion(f),
    };
    let axis = grid.axis()?;
    let along: Vec<(f64, Complex64)> = axis.iter().map(|&s| (s, c.eval(&[s], 0))).collect();
    let fit = fit_gaussian(&along)?;
    let w: Vec<Complex64> = (0..f.order()).map(|h| c.eval(&[0.0], h)).collect();
    let part = choose_shift(f, &g, &w)?;

    let mut product_residual = 0.0f64;
    for &s in &axis {
        let gauss = Complex64::from_polar((-fit.sigma * s * s).exp(), fit.b * s);
        for h in 0..f.order() {
            product_residual = product_residual.max((c.eval(&[s], h) - gauss * w[h]).norm());
        }
    }
    let failed = first_failure([
        (DecomposeStep::FitGaussian, fit.residual <= FIT_TOL),
        (
            DecomposeStep::FiniteShift,
            part.shift_residual <= MEASURE_TOL,
        ),
        (DecomposeStep::ProductForm, product_residual <= FIT_TOL),
        (DecomposeStep::SupportInG, part.passes()),
    ]);
    Ok(Decomposition {
        success: failed.is_none(),
        sigma: fit.sigma,
        b: fit.b,
        omega_hat: part.omega_hat.iter().map(|v| v.re).collect(),
        omega: part.omega.clone(),
        shift: f.from_index(part.g0).to_string(),
        shift_coords: f.from_index(part.g0).0,
        certificate: Certificate {
            fit_residual: fit.residual,
            shift_residual: part.shift_residual,
            product_residual,
            imag_residual: part.imag_residual,
            coset_residual: part.coset_residual,
            support_residual: part.support_residual,
            failed_step: failed,
            cross_term: None,
            grid_points: axis.len() * f.order(),
        },
    })
}

fn decompose_plane(c: &FourierGaussCharFn, grid: &GridSpec) -> Result<Decomposition> {
    let axis = grid.axis()?;
    let along: Vec<(f64, Complex64)> = axis.iter().map(|&s| (s, c.eval(&[s, 0.0], 0))).collect();
    let fit = fit_gaussian(&along)?;
    let mut product_residual = 0.0f64;
    let mut support_residual = 0.0f64;
    for &s in &axis {
        let gauss = Complex64::from_polar((-fit.sigma * s * s).exp(), fit.b * s);
        for &t in &axis {
            let w = c.eval(&[0.0, t], 0);
            product_residual = product_residual.max((c.eval(&[s, t], 0) - gauss * w).norm());
            // omega on G = {0} has omega_hat = 1
            support_residual = support_residual.max((w - 1.0).norm());
        }
    }
    let log = |s: f64, t: f64| c.eval(&[s, t], 0).ln();
    let cross = -(log(1.0, 1.0) - log(1.0, 0.0) - log(0.0, 1.0) + log(0.0, 0.0)).re / 2.0;
    let failed = first_failure([
        (DecomposeStep::FitGaussian, fit.residual <= FIT_TOL),
        (DecomposeStep::FiniteShift, true),
        (DecomposeStep::ProductForm, product_residual <= FIT_TOL),
        (DecomposeStep::SupportInG, support_residual <= FIT_TOL),
    ]);
    Ok(Decomposition {
        success: failed.is_none(),
        sigma: fit.sigma,
        b: fit.b,
        omega_hat: vec![1.0],
        omega: None,
        shift: "0".into(),
        shift_coords: Vec::new(),
        certificate: Certificate {
            fit_residual: fit.residual,
            shift_residual: 0.0,
            product_residual,
            imag_residual: 0.0,
            coset_residual: 0.0,
            support_residual,
            failed_step: failed,
            cross_term: Some(cross),
            grid_points: axis.len() * axis.len(),
        },
    })
}

/// The finite case `mu = omega * E_x0` with `omega` a law on `G`.
pub fn decompose_finite(c: &FiniteCharFn, g: Option<&Subgroup>) -> Result<Decomposition> {
    let f = c.dual();
    let g = match g {
        Some(g) if g.parent().moduli() != f.moduli() => {
            return Err(Error::structural("G is not a subgroup of the group"))
        }
        Some(g) => g.clone(),
        None => crate::group::two_torsion(f),
    };
    let part = choose_shift(f, &g, c.values())?;
    let failed = first_failure([
        (DecomposeStep::FitGaussian, true),
        (
            DecomposeStep::FiniteShift,
            part.shift_residual <= MEASURE_TOL,
        ),
        (DecomposeStep::ProductForm, true),
        (DecomposeStep::SupportInG, part.passes()),
    ]);
    Ok(Decomposition {
        success: failed.is_none(),
        sigma: 0.0,
        b: 0.0,
        omega_hat: part.omega_hat.iter().map(|v| v.re).collect(),
        omega: part.omega.clone(),
        shift: f.from_index(part.g0).to_string(),
        shift_coords: f.from_index(part.g0).0,
        certificate: Certificate {
            fit_residual: 0.0,
            shift_residual: part.shift_residual,
            product_residual: 0.0,
            imag_residual: part.imag_residual,
            coset_residual: part.coset_residual,
            support_residual: part.support_residual,
            failed_step: failed,
            cross_term: None,
            grid_points: f.order(),
        },
    })
}
