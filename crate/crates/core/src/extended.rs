//! Groups beyond the finite ones: `R^d x F`, the character group `H_a` of an
//! a-adic solenoid, the automorphisms `p/q` of the solenoid, and finite
//! truncations `Z(a_0 ... a_{N-1})` of the a-adic integers.
//!
//! The sequence `a` is stored as a finite prefix plus the set of primes that
//! occur infinitely often. Where a concrete tail is needed (truncations,
//! enumeration by level) the tail cycles through those primes in increasing
//! order.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, Homomorphism, DEFAULT_ORDER_BOUND};

/// `R^d x F` with `d <= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealExtGroup {
    real_dim: usize,
    finite: FiniteAbelianGroup,
}

impl RealExtGroup {
    pub fn new(real_dim: usize, finite: FiniteAbelianGroup) -> Result<Self> {
        if real_dim > 2 {
            return Err(Error::structural(format!(
                "real dimension {real_dim} > 2 is not supported"
            )));
        }
        Ok(Self { real_dim, finite })
    }

    pub fn real(real_dim: usize) -> Result<Self> {
        Self::new(real_dim, FiniteAbelianGroup::trivial())
    }

    pub fn real_dim(&self) -> usize {
        self.real_dim
    }

    pub fn finite(&self) -> &FiniteAbelianGroup {
        &self.finite
    }
}

/// Block-diagonal automorphism `(t, g) -> (A t, alpha_G g)` of `R^d x F`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealExtAutomorphism {
    group: RealExtGroup,
    real: Vec<f64>,
    finite: Homomorphism,
}

impl RealExtAutomorphism {
    /// `real` is a row-major `d x d` matrix; it must be invertible and
    /// `finite` must be an automorphism of the finite part.
    pub fn new(group: &RealExtGroup, real: Vec<f64>, finite: Homomorphism) -> Result<Self> {
        let d = group.real_dim();
        if real.len() != d * d {
            return Err(Error::structural(format!(
                "real part needs {} entries, got {}",
                d * d,
                real.len()
            )));
        }
        if finite.source() != group.finite() || !finite.is_endomorphism() {
            return Err(Error::structural("finite part acts on a different group"));
        }
        if !finite.is_automorphism() {
            return Err(Error::domain("finite part is not an automorphism"));
        }
        let det = match d {
            0 => 1.0,
            1 => real[0],
            _ => real[0] * real[3] - real[1] * real[2],
        };
        if det == 0.0 || !det.is_finite() {
            return Err(Error::domain("real part is not invertible"));
        }
        Ok(Self {
            group: group.clone(),
            real,
            finite,
        })
    }

    /// `(t, g) -> (a t, alpha_G g)` on `R x F` (or `a I` on `R^d`).
    pub fn scalar(group: &RealExtGroup, a: f64, finite: Homomorphism) -> Result<Self> {
        let d = group.real_dim();
        let real = (0..d * d)
            .map(|k| if k / d == k % d { a } else { 0.0 })
            .collect();
        Self::new(group, real, finite)
    }

    pub fn group(&self) -> &RealExtGroup {
        &self.group
    }

    pub fn real(&self) -> &[f64] {
        &self.real
    }

    pub fn finite(&self) -> &Homomorphism {
        &self.finite
    }

    /// Action of the adjoint on the real part of the dual: `s -> A^T s`.
    pub fn adjoint_real(&self, s: &[f64]) -> Vec<f64> {
        let d = self.group.real_dim();
        (0..d)
            .map(|i| (0..d).map(|k| self.real[k * d + i] * s[k]).sum())
            .collect()
    }

    /// Action on the primal real part: `t -> A t`.
    pub fn apply_real(&self, t: &[f64]) -> Vec<f64> {
        let d = self.group.real_dim();
        (0..d)
            .map(|i| (0..d).map(|k| self.real[i * d + k] * t[k]).sum())
            .collect()
    }

    /// `Ker(I + alpha) = {0}`: `I + A` invertible on `R^d` and the kernel of
    /// `I + alpha_G` trivial.
    pub fn condition1(&self) -> Result<bool> {
        let d = self.group.real_dim();
        let mut m = self.real.clone();
        for i in 0..d {
            m[i * d + i] += 1.0;
        }
        let det = match d {
            0 => 1.0,
            1 => m[0],
            _ => m[0] * m[3] - m[1] * m[2],
        };
        Ok(det.abs() > 1e-12 && crate::group::check_condition1(&self.finite)?)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// The sequence `a = (a_0, a_1, ...)` defining an a-adic solenoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolenoidSpec {
    prefix: Vec<u64>,
    infinite_primes: BTreeSet<u64>,
}

impl SolenoidSpec {
    pub fn new(prefix: Vec<u64>, infinite_primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        if let Some(bad) = prefix.iter().find(|&&a| a < 2) {
            return Err(Error::structural(format!(
                "sequence term {bad} must exceed 1"
            )));
        }
        let infinite_primes: BTreeSet<u64> = infinite_primes.into_iter().collect();
        if infinite_primes.is_empty() {
            return Err(Error::structural(
                "an infinite sequence with terms > 1 has at least one recurring prime",
            ));
        }
        if let Some(bad) = infinite_primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::structural(format!("{bad} is not a prime")));
        }
        Ok(Self {
            prefix,
            infinite_primes,
        })
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn infinite_primes(&self) -> &BTreeSet<u64> {
        &self.infinite_primes
    }

    /// `a_i` of the concrete sequence (prefix, then the recurring primes in turn).
    pub fn term(&self, i: usize) -> u64 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            let k = self.infinite_primes.len();
            *self
                .infinite_primes
                .iter()
                .nth((i - self.prefix.len()) % k)
                .expect("non-empty")
        }
    }

    /// `a_0 a_1 ... a_{n-1}`.
    pub fn partial_product(&self, n: usize) -> Result<u64> {
        (0..n).try_fold(1u64, |acc, i| {
            acc.checked_mul(self.term(i))
                .ok_or_else(|| Error::capacity("sequence product", u128::MAX, u64::MAX as u128))
        })
    }

    /// The part of `d` made of primes that do not recur.
    fn strip_recurring(&self, d: &BigInt) -> BigInt {
        let mut d = d.abs();
        for &p in &self.infinite_primes {
            let p = BigInt::from(p);
            while (&d % &p).is_zero() {
                d /= &p;
            }
        }
        d
    }

    /// `r` lies in `H_a` iff its reduced denominator divides some `a_0 ... a_n`.
    pub fn ha_contains(&self, r: &BigRational) -> bool {
        let finite_part = self.strip_recurring(r.denom());
        let prefix: BigInt = self.prefix.iter().map(|&a| BigInt::from(a)).product();
        let prefix = self.strip_recurring(&prefix);
        (prefix % finite_part).is_zero()
    }

    /// Minimal `n` such that `r = m / (a_0 ... a_n)`.
    pub fn level_of(&self, r: &BigRational) -> Option<usize> {
        if !self.ha_contains(r) {
            return None;
        }
        let den = r.denom().abs();
        let mut prod = BigInt::one();
        let mut n = 0usize;
        loop {
            prod *= BigInt::from(self.term(n));
            if (&prod % &den).is_zero() {
                return Some(n);
            }
            n += 1;
        }
    }

    pub fn dual_element(&self, r: BigRational) -> Result<SolenoidDualElement> {
        let level = self
            .level_of(&r)
            .ok_or_else(|| Error::domain(format!("{r} is not in H_a")))?;
        Ok(SolenoidDualElement { value: r, level })
    }

    /// All `m / (a_0 ... a_n)` with `n <= max_level` and `|r| <= radius`, sorted.
    pub fn dual_elements(&self, max_level: usize, radius: f64) -> Result<Vec<SolenoidDualElement>> {
        let den = self.partial_product(max_level + 1)?;
        let bound = (radius * den as f64).floor() as i64;
        let den = BigInt::from(den);
        (-bound..=bound)
            .map(|m| self.dual_element(BigRational::new(BigInt::from(m), den.clone())))
            .collect()
    }

    /// The truncation `Z(a_0 ... a_{N-1})` of the a-adic integers.
    pub fn adic_truncation(&self, level: usize) -> Result<FiniteAbelianGroup> {
        if level == 0 {
            return Ok(FiniteAbelianGroup::trivial());
        }
        let order = self.partial_product(level)?;
        if order as u128 > DEFAULT_ORDER_BOUND as u128 {
            return Err(Error::capacity(
                "adic truncation",
                order as u128,
                DEFAULT_ORDER_BOUND as u128,
            ));
        }
        FiniteAbelianGroup::cyclic(order)
    }

    /// Projection `Z(a_0 .. a_{N}) -> Z(a_0 .. a_{N-1})` between consecutive truncations.
    pub fn truncation_projection(&self, level: usize) -> Result<Homomorphism> {
        let source = self.adic_truncation(level + 1)?;
        let target = self.adic_truncation(level)?;
        if target.rank() == 0 {
            return Homomorphism::new(&source, &target, Vec::new());
        }
        Homomorphism::new(&source, &target, vec![vec![1]])
    }
}

/// An element `m / (a_0 ... a_n)` of `H_a`, in lowest terms, with its level `n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SolenoidDualElement {
    value: BigRational,
    level: usize,
}

impl SolenoidDualElement {
    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

/// The automorphism `f_p f_q^{-1}` of the solenoid, identified with `p/q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolenoidAutomorphism {
    p: i64,
    q: i64,
}

impl SolenoidAutomorphism {
    /// `f_p` and `f_q` must both be automorphisms, i.e. every prime of `p`
    /// and `q` recurs in `a`.
    pub fn new(spec: &SolenoidSpec, p: i64, q: i64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::domain("p and q must be nonzero"));
        }
        let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
        if p.unsigned_abs().gcd(&q.unsigned_abs()) != 1 {
            return Err(Error::domain(format!("{p} and {q} are not coprime")));
        }
        for n in [p.unsigned_abs(), q.unsigned_abs()] {
            if let Some(bad) = prime_factors(n)
                .into_iter()
                .find(|f| !spec.infinite_primes().contains(f))
            {
                return Err(Error::domain(format!(
                    "f_{n} is not an automorphism: prime {bad} does not recur in the sequence"
                )));
            }
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn as_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.p), BigInt::from(self.q))
    }

    /// The adjoint action on `H_a`: multiplication by `p/q`.
    pub fn apply_dual(
        &self,
        spec: &SolenoidSpec,
        r: &SolenoidDualElement,
    ) -> Result<SolenoidDualElement> {
        spec.dual_element(r.value() * self.as_rational())
    }
}

/// `Ker(I + p/q) = {0}` on the solenoid: `p + q != 0` and every prime of
/// `p + q` recurs, so that `(p+q) H_a = H_a` and `Ker f_{p+q} = A(Sigma_a, (p+q) H_a)`
/// is trivial.
pub fn solenoid_condition1(spec: &SolenoidSpec, alpha: &SolenoidAutomorphism) -> bool {
    let n = alpha.p() + alpha.q();
    n != 0
        && prime_factors(n.unsigned_abs())
            .iter()
            .all(|f| spec.infinite_primes().contains(f))
}

/// `Ker f_2` on the solenoid is nontrivial exactly when 2 does not recur.
pub fn solenoid_has_2_torsion(spec: &SolenoidSpec) -> bool {
    !spec.infinite_primes().contains(&2)
}

/// `exp(2 pi i r t)`: the pairing of `r in H_a` with the image of `t in R`.
pub fn solenoid_pairing(t: f64, r: &SolenoidDualElement) -> Complex64 {
    let (num, den) = (r.value().numer(), r.value().denom());
    // reduce the integer part first so the f64 product stays small
    let frac = BigRational::new(num.mod_floor(den), den.clone());
    let int_part = num.div_floor(den);
    let phase = frac.to_f64().unwrap_or(0.0) * t
        + if t.fract() == 0.0 {
            0.0
        } else {
            (int_part.to_f64().unwrap_or(0.0) * t).rem_euclid(1.0)
        };
    Complex64::from_polar(1.0, std::f64::consts::TAU * phase.rem_euclid(1.0))
}

/// Finite evidence for the order of `Ker f_n` on the solenoid, read off the
/// truncations `Z(a_0 ... a_{N-1})` of the a-adic integers.
///
/// The exact sequence `0 -> Delta_a -> Sigma_a -> T -> 0` and the snake lemma
/// for `f_n` give `|Ker_Sigma| = n |Ker_Delta| / |Coker_Delta|` (the cokernel on
/// `Sigma_a` vanishes since the solenoid is connected). `Ker_Delta` is the
/// image at level `N` of the kernel at a deeper level, `Coker_Delta` is
/// `Z(D_N) / n Z(D_N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelEvidence {
    pub n: u64,
    pub level: usize,
    pub depth: usize,
    pub truncation_order: usize,
    pub delta_kernel: usize,
    pub delta_cokernel: usize,
    pub solenoid_kernel_order: u64,
    /// Whether `level` is deep enough for the counts to have stabilised.
    pub stable: bool,
}

impl SolenoidSpec {
    /// Smallest level at which kernel/cokernel counts for `f_n` are stable.
    pub fn stable_level(&self, n: u64) -> Result<usize> {
        let mut level = self.prefix.len();
        loop {
            if self.level_is_stable(n, level)? {
                return Ok(level);
            }
            level += 1;
        }
    }

    fn level_is_stable(&self, n: u64, level: usize) -> Result<bool> {
        if level < self.prefix.len() {
            return Ok(false);
        }
        let d = self.partial_product(level)?;
        Ok(prime_factors(n)
            .into_iter()
            .filter(|p| self.infinite_primes.contains(p))
            .all(|p| valuation(d, p) >= valuation(n, p)))
    }

    fn evidence_depth(&self, n: u64, level: usize) -> Result<usize> {
        let base = self.partial_product(level)?;
        let mut depth = 0;
        loop {
            let deep = self.partial_product(level + depth)?;
            let ok = prime_factors(n)
                .into_iter()
                .filter(|p| self.infinite_primes.contains(p))
                .all(|p| valuation(deep, p) >= valuation(base, p) + valuation(n, p));
            if ok {
                return Ok(depth);
            }
            depth += 1;
        }
    }

    pub fn kernel_evidence(&self, n: u64, level: usize) -> Result<KernelEvidence> {
        if n == 0 {
            return Err(Error::domain("f_0 is not an endomorphism worth inspecting"));
        }
        let depth = self.evidence_depth(n, level)?;
        let shallow = self.adic_truncation(level)?;
        let deep = self.adic_truncation(level + depth)?;
        let d_n = shallow.order();

        let kernel = Homomorphism::scalar(&deep, n as i64).kernel();
        let mut projected: Vec<usize> = kernel.indices().iter().map(|&x| x % d_n).collect();
        projected.sort_unstable();
        projected.dedup();
        let delta_kernel = projected.len();

        let image = Homomorphism::scalar(&shallow, n as i64).image();
        let delta_cokernel = d_n / image.order();

        let numerator = n as u128 * delta_kernel as u128;
        if !numerator.is_multiple_of(delta_cokernel as u128) {
            return Err(Error::validation(format!(
                "kernel count {numerator} not divisible by cokernel {delta_cokernel}"
            )));
        }
        Ok(KernelEvidence {
            n,
            level,
            depth,
            truncation_order: d_n,
            delta_kernel,
            delta_cokernel,
            solenoid_kernel_order: (numerator / delta_cokernel as u128) as u64,
            stable: self.level_is_stable(n, level)?,
        })
    }
}
