//! Finite abelian groups `Z(n_1) x ... x Z(n_k)`, their (self-)duals,
//! homomorphisms given by integer matrices, subgroups and annihilators.
//!
//! Elements are addressed either by coordinates ([`Element`]) or by their
//! row-major index in `0..order`; the index form is what the enumeration
//! based algorithms use internally. The character group of
//! `Z(n_1) x ... x Z(n_k)` is identified with the same group through the
//! pairing `(x, y) = exp(2 pi i sum_k x_k y_k / n_k)`.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default upper bound on the order of any group that is enumerated.
pub const DEFAULT_ORDER_BOUND: usize = 100_000;

/// Upper bound on `|G|^2` for operations that enumerate pairs of elements.
pub const PAIR_BOUND: usize = 1 << 22;

/// Coordinates of a group (or dual group) element, each reduced mod `n_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Element(pub Vec<u64>);

/// Dual elements live in the same coordinate space (self-dual representation).
pub type DualElement = Element;

impl Element {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `Z(n_1) x ... x Z(n_k)`. The empty product is the trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
    #[serde(skip)]
    order: usize,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    exponent: u64,
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        Self::with_bound(moduli, DEFAULT_ORDER_BOUND)
    }

    /// Like [`FiniteAbelianGroup::new`] with an explicit enumeration bound.
    pub fn with_bound(moduli: Vec<u64>, bound: usize) -> Result<Self> {
        if let Some(bad) = moduli.iter().find(|&&n| n < 2) {
            return Err(Error::structural(format!(
                "modulus {bad} is smaller than 2"
            )));
        }
        let order = moduli
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .unwrap_or(u128::MAX);
        if order > bound as u128 {
            return Err(Error::capacity("group enumeration", order, bound as u128));
        }
        let order = order as usize;
        let mut strides = vec![1usize; moduli.len()];
        for i in (0..moduli.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1] as usize;
        }
        let exponent = moduli.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        Ok(Self {
            moduli,
            order,
            strides,
            exponent,
        })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn trivial() -> Self {
        Self::new(Vec::new()).expect("trivial group")
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the moduli.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// The character group, identified with `self`.
    pub fn dual(&self) -> FiniteAbelianGroup {
        self.clone()
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::structural(format!(
                "element has {} coordinates, group has rank {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(Element(
            coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.moduli).all(|(c, n)| c < n)
    }

    fn check(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::structural(format!(
                "element {x} does not belong to group with moduli {:?}",
                self.moduli
            )))
        }
    }

    pub fn index_of(&self, x: &Element) -> usize {
        x.0.iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    pub fn from_index(&self, idx: usize) -> Element {
        Element(
            self.strides
                .iter()
                .zip(&self.moduli)
                .map(|(&s, &n)| ((idx / s) % n as usize) as u64)
                .collect(),
        )
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order).map(move |i| self.from_index(i))
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.moduli)
                .map(|((a, b), n)| (a + b) % n)
                .collect(),
        )
    }

    pub fn neg(&self, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(a, n)| (n - a) % n)
                .collect(),
        )
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, k: i64, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(&a, &n)| {
                    let n = n as i128;
                    ((k as i128 * a as i128).rem_euclid(n)) as u64
                })
                .collect(),
        )
    }

    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.moduli) {
            let n = n as usize;
            out += (((a / s) % n + (b / s) % n) % n) * s;
        }
        out
    }

    pub fn neg_idx(&self, a: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.moduli) {
            let n = n as usize;
            out += ((n - (a / s) % n) % n) * s;
        }
        out
    }

    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    pub fn scale_idx(&self, k: i64, a: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.moduli) {
            let c = ((a / s) % n as usize) as i128;
            out += ((k as i128 * c).rem_euclid(n as i128)) as usize * s;
        }
        out
    }

    /// Exact phase of the pairing: `(x, y) = exp(2 pi i num / exponent)`.
    pub fn pairing_phase_idx(&self, x: usize, y: usize) -> u64 {
        let e = self.exponent as u128;
        let mut num = 0u128;
        for (&s, &n) in self.strides.iter().zip(&self.moduli) {
            let n = n as usize;
            let xi = ((x / s) % n) as u128;
            let yi = ((y / s) % n) as u128;
            num = (num + (xi * yi % n as u128) * (e / n as u128)) % e;
        }
        num as u64
    }

    pub fn pairing_idx(&self, x: usize, y: usize) -> Complex64 {
        root_of_unity(self.pairing_phase_idx(x, y), self.exponent)
    }

    /// Value of the character `y` at `x`.
    pub fn pairing(&self, x: &Element, y: &DualElement) -> Result<Complex64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.pairing_idx(self.index_of(x), self.index_of(y)))
    }

    /// Order of the element with index `a`.
    pub fn element_order(&self, a: usize) -> u64 {
        self.from_index(a)
            .0
            .iter()
            .zip(&self.moduli)
            .fold(1u64, |acc, (&c, &n)| acc.lcm(&(n / c.gcd(&n))))
    }

    /// Guard for algorithms that touch every pair of elements.
    pub fn ensure_pairs(&self, what: &str) -> Result<()> {
        let needed = (self.order as u128) * (self.order as u128);
        if needed > PAIR_BOUND as u128 {
            Err(Error::capacity(what, needed, PAIR_BOUND as u128))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "{{0}}");
        }
        for (i, n) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "Z({n})")?;
        }
        Ok(())
    }
}

/// `exp(2 pi i k / n)`, with exact values at the quarter turns.
pub fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

/// A subgroup stored as the sorted list of its element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    members: Vec<usize>,
}

impl Subgroup {
    /// Validates that `elements` is a subgroup of `parent`.
    pub fn new(parent: &FiniteAbelianGroup, elements: &[Element]) -> Result<Self> {
        let mut members = Vec::with_capacity(elements.len());
        for x in elements {
            parent.check(x)?;
            members.push(parent.index_of(x));
        }
        members.sort_unstable();
        members.dedup();
        let sub = Self {
            parent: parent.clone(),
            members,
        };
        if !sub.contains_idx(0) {
            return Err(Error::validation("subset does not contain zero"));
        }
        let span = Subgroup::generated_by_idx(parent, &sub.members);
        if span.members != sub.members {
            return Err(Error::validation("subset is not closed under addition"));
        }
        Ok(sub)
    }

    pub(crate) fn from_sorted(parent: &FiniteAbelianGroup, members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self {
            parent: parent.clone(),
            members,
        }
    }

    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        Self::from_sorted(parent, vec![0])
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        Self::from_sorted(parent, (0..parent.order()).collect())
    }

    pub fn generated_by(parent: &FiniteAbelianGroup, gens: &[Element]) -> Result<Self> {
        let mut idx = Vec::with_capacity(gens.len());
        for g in gens {
            parent.check(g)?;
            idx.push(parent.index_of(g));
        }
        Ok(Self::generated_by_idx(parent, &idx))
    }

    pub fn generated_by_idx(parent: &FiniteAbelianGroup, gens: &[usize]) -> Self {
        let mut seen = vec![false; parent.order()];
        seen[0] = true;
        let mut members = vec![0usize];
        let mut cursor = 0;
        while cursor < members.len() {
            let x = members[cursor];
            cursor += 1;
            for &g in gens {
                let y = parent.add_idx(x, g);
                if !seen[y] {
                    seen[y] = true;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        Self::from_sorted(parent, members)
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.members.iter().map(|&i| self.parent.from_index(i))
    }

    pub fn contains_idx(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.parent.contains(x) && self.contains_idx(self.parent.index_of(x))
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members.len() == self.parent.order()
    }

    /// A (greedy, not necessarily minimal) generating set.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.parent.order()];
        span[0] = true;
        let mut span_list = vec![0usize];
        for &x in &self.members {
            if span[x] {
                continue;
            }
            gens.push(x);
            // span <- span + <x>
            let mut frontier = span_list.clone();
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for s in frontier {
                    let y = self.parent.add_idx(s, x);
                    if !span[y] {
                        span[y] = true;
                        span_list.push(y);
                        next.push(y);
                    }
                }
                frontier = next;
            }
        }
        gens
    }
}

/// A homomorphism `Z(n_1) x .. x Z(n_k) -> Z(m_1) x .. x Z(m_l)` given by an
/// integer matrix with `l` rows and `k` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    matrix: Vec<Vec<i64>>,
}

impl Homomorphism {
    /// Entries are reduced modulo the target modulus of their row. A matrix is
    /// rejected unless `n_j * M[i][j] = 0 mod m_i` for every entry.
    pub fn new(
        source: &FiniteAbelianGroup,
        target: &FiniteAbelianGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if matrix.len() != target.rank() {
            return Err(Error::structural(format!(
                "matrix has {} rows, target rank is {}",
                matrix.len(),
                target.rank()
            )));
        }
        let mut reduced = Vec::with_capacity(matrix.len());
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != source.rank() {
                return Err(Error::structural(format!(
                    "matrix row {i} has {} columns, source rank is {}",
                    row.len(),
                    source.rank()
                )));
            }
            let m = target.moduli()[i] as i128;
            let mut out = Vec::with_capacity(row.len());
            for (j, &e) in row.iter().enumerate() {
                let n = source.moduli()[j] as i128;
                let e = (e as i128).rem_euclid(m);
                if (n * e) % m != 0 {
                    return Err(Error::structural(format!(
                        "entry ({i},{j}) = {e} is not well defined: {n}*{e} != 0 mod {m}"
                    )));
                }
                out.push(e as i64);
            }
            reduced.push(out);
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            matrix: reduced,
        })
    }

    pub fn endomorphism(group: &FiniteAbelianGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(group, group, matrix)
    }

    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        Self::scalar(group, 1)
    }

    /// `f_n x = n x`.
    pub fn scalar(group: &FiniteAbelianGroup, n: i64) -> Self {
        let k = group.rank();
        let matrix = (0..k)
            .map(|i| (0..k).map(|j| if i == j { n } else { 0 }).collect())
            .collect();
        Self::new(group, group, matrix).expect("scalar matrices are always well defined")
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.source.check(x)?;
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &Element) -> Element {
        Element(
            self.matrix
                .iter()
                .zip(self.target.moduli())
                .map(|(row, &m)| {
                    let m = m as i128;
                    row.iter()
                        .zip(&x.0)
                        .map(|(&a, &c)| a as i128 * c as i128)
                        .sum::<i128>()
                        .rem_euclid(m) as u64
                })
                .collect(),
        )
    }

    pub fn apply_idx(&self, x: usize) -> usize {
        let x = self.source.from_index(x);
        self.target.index_of(&self.apply_unchecked(&x))
    }

    /// Lookup table `x -> f(x)` over the whole source.
    pub fn table(&self) -> Vec<usize> {
        (0..self.source.order())
            .map(|x| self.apply_idx(x))
            .collect()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if other.target != self.source {
            return Err(Error::structural("composition: target/source mismatch"));
        }
        let rows = self.target.rank();
        let cols = other.source.rank();
        let inner = self.source.rank();
        let matrix = (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        let m = self.target.moduli()[i] as i128;
                        (0..inner)
                            .map(|k| self.matrix[i][k] as i128 * other.matrix[k][j] as i128)
                            .sum::<i128>()
                            .rem_euclid(m) as i64
                    })
                    .collect()
            })
            .collect();
        Homomorphism::new(&other.source, &self.target, matrix)
    }

    /// Pointwise sum `x -> f(x) + g(x)`.
    pub fn add(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::structural(
                "sum of homomorphisms with different groups",
            ));
        }
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Homomorphism::new(&self.source, &self.target, matrix)
    }

    pub fn neg(&self) -> Homomorphism {
        let matrix = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|x| -x).collect())
            .collect();
        Homomorphism::new(&self.source, &self.target, matrix).expect("negation keeps compatibility")
    }

    /// The adjoint `Y_target -> Y_source`, defined by `(x, adj(y)) = (f(x), y)`.
    ///
    /// With moduli `n` (source) and `m` (target) the adjoint matrix is
    /// `N[j][i] = n_j * M[i][j] / m_i`, the transpose when the moduli agree.
    pub fn adjoint(&self) -> Homomorphism {
        let n = self.source.moduli();
        let m = self.target.moduli();
        let matrix = (0..self.source.rank())
            .map(|j| {
                (0..self.target.rank())
                    .map(|i| {
                        let v = n[j] as i128 * self.matrix[i][j] as i128;
                        debug_assert_eq!(v % m[i] as i128, 0);
                        (v / m[i] as i128) as i64
                    })
                    .collect()
            })
            .collect();
        let adj = Homomorphism::new(&self.target, &self.source, matrix)
            .expect("adjoint of a well-defined homomorphism is well defined");
        #[cfg(debug_assertions)]
        {
            let pairs = self.source.order() * self.target.order();
            if pairs <= 4096 {
                for x in 0..self.source.order() {
                    let fx = self.apply_idx(x);
                    for y in 0..self.target.order() {
                        let lhs = self.target.pairing_idx(fx, y);
                        let rhs = self.source.pairing_idx(x, adj.apply_idx(y));
                        debug_assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
        }
        adj
    }

    pub fn is_bijective(&self) -> bool {
        if self.source.order() != self.target.order() {
            return false;
        }
        let mut hit = vec![false; self.target.order()];
        for x in 0..self.source.order() {
            let y = self.apply_idx(x);
            if hit[y] {
                return false;
            }
            hit[y] = true;
        }
        true
    }

    /// True iff `self` is an endomorphism acting bijectively.
    pub fn is_automorphism(&self) -> bool {
        self.is_endomorphism() && self.is_bijective()
    }

    pub fn kernel(&self) -> Subgroup {
        let members = (0..self.source.order())
            .filter(|&x| self.apply_idx(x) == 0)
            .collect();
        Subgroup::from_sorted(&self.source, members)
    }

    pub fn image(&self) -> Subgroup {
        let mut hit = vec![false; self.target.order()];
        for x in 0..self.source.order() {
            hit[self.apply_idx(x)] = true;
        }
        let members = hit
            .iter()
            .enumerate()
            .filter_map(|(i, &h)| h.then_some(i))
            .collect();
        Subgroup::from_sorted(&self.target, members)
    }
}

/// `Ker(I + alpha) = {0}` for an automorphism `alpha`.
pub fn check_condition1(alpha: &Homomorphism) -> Result<bool> {
    if !alpha.is_automorphism() {
        return Err(Error::domain(
            "condition (Ker(I+alpha) = 0) needs an automorphism",
        ));
    }
    let i_plus = Homomorphism::identity(alpha.source()).add(alpha)?;
    Ok(i_plus.kernel().is_trivial())
}

/// `A(Y, S) = { y : (x, y) = 1 for all x in S }`, computed exactly from a
/// generating set of `S`.
pub fn annihilator(dual: &FiniteAbelianGroup, s: &Subgroup) -> Result<Subgroup> {
    if dual.moduli() != s.parent().moduli() {
        return Err(Error::structural(
            "annihilator: dual does not match the subgroup's group",
        ));
    }
    let gens = s.generators();
    let members = (0..dual.order())
        .filter(|&y| gens.iter().all(|&x| dual.pairing_phase_idx(x, y) == 0))
        .collect();
    Ok(Subgroup::from_sorted(dual, members))
}

/// `{ x : 2x = 0 }`.
pub fn two_torsion(group: &FiniteAbelianGroup) -> Subgroup {
    Homomorphism::scalar(group, 2).kernel()
}

/// `X^(n) = f_n(X)`.
pub fn multiples(group: &FiniteAbelianGroup, n: i64) -> Subgroup {
    Homomorphism::scalar(group, n).image()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(moduli: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(moduli.to_vec()).unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn pairing_examples() {
        let z4 = g(&[4]);
        let one = z4.element(&[1]).unwrap();
        assert!(close(
            z4.pairing(&one, &one).unwrap(),
            Complex64::new(0.0, 1.0)
        ));

        let z23 = g(&[2, 3]);
        for y in z23.elements() {
            assert!(close(
                z23.pairing(&z23.zero(), &y).unwrap(),
                Complex64::new(1.0, 0.0)
            ));
        }
        let x = z23.element(&[1, 1]).unwrap();
        let y = z23.element(&[1, 2]).unwrap();
        let expected = Complex64::from_polar(1.0, std::f64::consts::TAU * 7.0 / 6.0);
        assert!(close(z23.pairing(&x, &y).unwrap(), expected));
    }

    #[test]
    fn pairing_rejects_foreign_elements() {
        let z4 = g(&[4]);
        let bad = Element(vec![1, 1]);
        assert!(matches!(
            z4.pairing(&bad, &z4.zero()),
            Err(Error::Structural(_))
        ));
        assert!(z4.pairing(&Element(vec![7]), &z4.zero()).is_err());
    }

    #[test]
    fn bad_moduli_and_capacity() {
        assert!(FiniteAbelianGroup::new(vec![1]).is_err());
        assert!(matches!(
            FiniteAbelianGroup::new(vec![1000, 1000]),
            Err(Error::Capacity { .. })
        ));
        assert!(FiniteAbelianGroup::with_bound(vec![1000, 1000], 1_000_000).is_ok());
        assert_eq!(FiniteAbelianGroup::trivial().order(), 1);
    }

    #[test]
    fn automorphism_examples() {
        let z5 = g(&[5]);
        assert!(Homomorphism::scalar(&z5, 2).is_automorphism());
        let v4 = g(&[2, 2]);
        let m = Homomorphism::endomorphism(&v4, vec![vec![0, 1], vec![1, 1]]).unwrap();
        assert!(m.is_automorphism());
        assert!(!Homomorphism::scalar(&g(&[4]), 2).is_automorphism());
    }

    #[test]
    fn ill_defined_matrix_rejected() {
        // Z(2) -> Z(4), x -> x is not well defined
        let z2 = g(&[2]);
        let z4 = g(&[4]);
        assert!(Homomorphism::new(&z2, &z4, vec![vec![1]]).is_err());
        assert!(Homomorphism::new(&z2, &z4, vec![vec![2]]).is_ok());
        assert!(Homomorphism::new(&z2, &z4, vec![vec![1, 0]]).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let z6 = g(&[6]);
        assert_eq!(
            Homomorphism::scalar(&z6, 5).adjoint(),
            Homomorphism::scalar(&z6, 5)
        );
        let v4 = g(&[2, 2]);
        let m = Homomorphism::endomorphism(&v4, vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(m.adjoint().matrix(), &[vec![1, 0], vec![1, 1]]);
        // exhaustive pairing identity over the 16 pairs
        let adj = m.adjoint();
        for x in v4.elements() {
            for y in v4.elements() {
                let lhs = v4.pairing(&m.apply(&x).unwrap(), &y).unwrap();
                let rhs = v4.pairing(&x, &adj.apply(&y).unwrap()).unwrap();
                assert!(close(lhs, rhs));
            }
        }
        let id = Homomorphism::identity(&v4);
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn adjoint_between_different_moduli() {
        // Z(2) -> Z(4), x -> 2x; adjoint Z(4) -> Z(2), y -> y
        let z2 = g(&[2]);
        let z4 = g(&[4]);
        let f = Homomorphism::new(&z2, &z4, vec![vec![2]]).unwrap();
        let adj = f.adjoint();
        assert_eq!(adj.matrix(), &[vec![1]]);
        for x in 0..2 {
            for y in 0..4 {
                let lhs = z4.pairing_idx(f.apply_idx(x), y);
                let rhs = z2.pairing_idx(x, adj.apply_idx(y));
                assert!(close(lhs, rhs));
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let z5 = g(&[5]);
        let f = Homomorphism::identity(&z5)
            .add(&Homomorphism::scalar(&z5, 2))
            .unwrap();
        assert!(f.kernel().is_trivial());
        let v4 = g(&[2, 2]);
        assert!(Homomorphism::scalar(&v4, 2).kernel().is_whole());
        let z6 = g(&[6]);
        let k = Homomorphism::scalar(&z6, 3).kernel();
        assert_eq!(k.indices(), &[0, 2, 4]);
    }

    #[test]
    fn condition1_examples() {
        let z5 = g(&[5]);
        assert!(check_condition1(&Homomorphism::scalar(&z5, 2)).unwrap());
        let v4 = g(&[2, 2]);
        let a = Homomorphism::endomorphism(&v4, vec![vec![0, 1], vec![1, 1]]).unwrap();
        assert!(check_condition1(&a).unwrap());
        assert!(!check_condition1(&Homomorphism::identity(&v4)).unwrap());
        let not_auto = Homomorphism::scalar(&g(&[4]), 2);
        assert!(matches!(check_condition1(&not_auto), Err(Error::Domain(_))));
    }

    #[test]
    fn annihilator_examples() {
        let z4 = g(&[4]);
        let trivial = Subgroup::trivial(&z4);
        assert!(annihilator(&z4, &trivial).unwrap().is_whole());
        assert!(annihilator(&z4, &Subgroup::whole(&z4))
            .unwrap()
            .is_trivial());
        let s =
            Subgroup::new(&z4, &[z4.element(&[0]).unwrap(), z4.element(&[2]).unwrap()]).unwrap();
        assert_eq!(annihilator(&z4, &s).unwrap().indices(), &[0, 2]);
    }

    #[test]
    fn two_torsion_examples() {
        let t = two_torsion(&g(&[2, 3]));
        assert_eq!(
            t.elements().collect::<Vec<_>>(),
            vec![Element(vec![0, 0]), Element(vec![1, 0])]
        );
        assert!(two_torsion(&g(&[5])).is_trivial());
        let t = two_torsion(&g(&[4, 2]));
        let got: Vec<_> = t.elements().collect();
        assert_eq!(
            got,
            vec![
                Element(vec![0, 0]),
                Element(vec![0, 1]),
                Element(vec![2, 0]),
                Element(vec![2, 1])
            ]
        );
        for x in t.indices().iter().skip(1) {
            assert_eq!(t.parent().element_order(*x), 2);
        }
    }

    #[test]
    fn subgroup_validation() {
        let z4 = g(&[4]);
        let one = z4.element(&[1]).unwrap();
        assert!(Subgroup::new(&z4, &[z4.zero(), one.clone()]).is_err());
        assert!(Subgroup::new(&z4, &[one]).is_err());
        let gen = Subgroup::generated_by(&z4, &[z4.element(&[2]).unwrap()]).unwrap();
        assert_eq!(gen.indices(), &[0, 2]);
    }

    #[test]
    fn index_round_trip() {
        let grp = g(&[3, 4, 2]);
        for i in 0..grp.order() {
            assert_eq!(grp.index_of(&grp.from_index(i)), i);
        }
        let a = grp.element(&[2, 3, 1]).unwrap();
        let b = grp.element(&[2, 2, 1]).unwrap();
        let (ia, ib) = (grp.index_of(&a), grp.index_of(&b));
        assert_eq!(grp.from_index(grp.add_idx(ia, ib)), grp.add(&a, &b));
        assert_eq!(grp.from_index(grp.neg_idx(ia)), grp.neg(&a));
        assert_eq!(grp.from_index(grp.scale_idx(-3, ia)), grp.scale(-3, &a));
    }
}
