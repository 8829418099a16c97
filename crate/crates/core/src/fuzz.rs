//! Seeded random instances: groups, automorphisms, and distribution pairs,
//! some built to satisfy eq2 and some unconstrained.

use num_integer::Integer;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::dist::FiniteDist;
use crate::group::{check_condition1, two_torsion, FiniteAbelianGroup, Homomorphism};

/// A group of order at most `max_order` with one to three cyclic factors.
pub fn random_group<R: Rng + ?Sized>(rng: &mut R, max_order: usize) -> FiniteAbelianGroup {
    loop {
        let rank = rng.random_range(1..=3);
        let moduli: Vec<u64> = (0..rank).map(|_| rng.random_range(2..=12)).collect();
        if moduli.iter().product::<u64>() as usize <= max_order {
            return FiniteAbelianGroup::new(moduli).expect("small group");
        }
    }
}

/// A uniformly drawn compatible integer matrix, redrawn until it is an
/// automorphism satisfying `accept`. Falls back to the identity (or `None`
/// if the identity is not accepted) after many attempts.
pub fn random_automorphism_where<R, F>(
    rng: &mut R,
    group: &FiniteAbelianGroup,
    accept: F,
) -> Option<Homomorphism>
where
    R: Rng + ?Sized,
    F: Fn(&Homomorphism) -> bool,
{
    let m = group.moduli();
    for _ in 0..2000 {
        let matrix = (0..m.len())
            .map(|i| {
                (0..m.len())
                    .map(|j| {
                        let g = m[i].gcd(&m[j]);
                        (rng.random_range(0..g) * (m[i] / g)) as i64
                    })
                    .collect()
            })
            .collect();
        let h = Homomorphism::endomorphism(group, matrix).expect("compatible by construction");
        if h.is_automorphism() && accept(&h) {
            return Some(h);
        }
    }
    let id = Homomorphism::identity(group);
    accept(&id).then_some(id)
}

pub fn random_automorphism<R: Rng + ?Sized>(
    rng: &mut R,
    group: &FiniteAbelianGroup,
) -> Homomorphism {
    random_automorphism_where(rng, group, |_| true).expect("identity is accepted")
}

/// Random weights, about a third of them zero.
pub fn random_dist<R: Rng + ?Sized>(rng: &mut R, group: &FiniteAbelianGroup) -> FiniteDist {
    loop {
        let w: Vec<f64> = (0..group.order())
            .map(|_| {
                if rng.random_bool(0.33) {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        if let Ok(d) = FiniteDist::from_weights(group, w) {
            return d;
        }
    }
}

/// `(1 - eps) E_0 + eps nu` with `eps < 1/2`, whose transform stays at
/// modulus at least `1 - 2 eps > 0`.
pub fn nonvanishing_dist<R: Rng + ?Sized>(rng: &mut R, group: &FiniteAbelianGroup) -> FiniteDist {
    let eps = rng.random_range(0.05..0.45);
    let e0 = FiniteDist::point(group, &group.zero()).expect("zero");
    e0.mix(&random_dist(rng, group), eps)
        .expect("weight in range")
}

/// A nonvanishing law on the 2-torsion subgroup.
pub fn two_torsion_dist<R: Rng + ?Sized>(rng: &mut R, group: &FiniteAbelianGroup) -> FiniteDist {
    let g = two_torsion(group);
    let eps = rng.random_range(0.0..0.45);
    let mut w = vec![0.0; group.order()];
    let raw: Vec<f64> = g.indices().iter().map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    for (&i, r) in g.indices().iter().zip(&raw) {
        w[i] = eps * r / total;
    }
    w[0] += 1.0 - eps;
    FiniteDist::new(group, w).expect("normalised")
}

/// `omega_j * E_{x_j}` with `omega_j` on the 2-torsion subgroup and
/// `x1 = -alpha x2 + t`, `t` of order at most 2, so that
/// `2 (x1 + alpha x2) = 0`. Such pairs satisfy eq2.
pub fn eq2_pair<R: Rng + ?Sized>(rng: &mut R, alpha: &Homomorphism) -> (FiniteDist, FiniteDist) {
    let group = alpha.source();
    let g = two_torsion(group);
    let x2 = rng.random_range(0..group.order());
    let t = *g.indices().choose(rng).expect("0 is in G");
    let x1 = group.add_idx(group.neg_idx(alpha.apply_idx(x2)), t);
    let mu1 = two_torsion_dist(rng, group)
        .shift(&group.from_index(x1))
        .expect("same group");
    let mu2 = two_torsion_dist(rng, group)
        .shift(&group.from_index(x2))
        .expect("same group");
    (mu1, mu2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Built to satisfy eq2.
    TorsionShifted,
    /// `(1 - eps) E_0 + eps nu` pairs.
    Nonvanishing,
    /// Arbitrary random pairs.
    Unconstrained,
    /// Haar measures of random subgroups.
    Haar,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub kind: InstanceKind,
    pub alpha: Homomorphism,
    pub mu1: FiniteDist,
    pub mu2: FiniteDist,
}

impl Instance {
    pub fn group(&self) -> &FiniteAbelianGroup {
        self.alpha.source()
    }
}

/// `count` instances on groups of order at most `max_order`, cycling
/// through the instance kinds.
pub fn instances<R: Rng + ?Sized>(rng: &mut R, count: usize, max_order: usize) -> Vec<Instance> {
    const KINDS: [InstanceKind; 4] = [
        InstanceKind::TorsionShifted,
        InstanceKind::Nonvanishing,
        InstanceKind::Unconstrained,
        InstanceKind::Haar,
    ];
    (0..count)
        .map(|i| {
            let group = random_group(rng, max_order);
            let alpha = random_automorphism(rng, &group);
            let kind = KINDS[i % KINDS.len()];
            let (mu1, mu2) = match kind {
                InstanceKind::TorsionShifted => eq2_pair(rng, &alpha),
                InstanceKind::Nonvanishing => (
                    nonvanishing_dist(rng, &group),
                    nonvanishing_dist(rng, &group),
                ),
                InstanceKind::Unconstrained => (random_dist(rng, &group), random_dist(rng, &group)),
                InstanceKind::Haar => {
                    let pick = |rng: &mut R| {
                        let gen = rng.random_range(0..group.order());
                        FiniteDist::uniform_on(&crate::group::Subgroup::generated_by_idx(
                            &group,
                            &[gen],
                        ))
                    };
                    (pick(rng), pick(rng))
                }
            };
            Instance {
                kind,
                alpha,
                mu1,
                mu2,
            }
        })
        .collect()
}

/// Instances satisfying eq2 whose automorphism satisfies condition1 and
/// whose transforms do not vanish. Every other instance has nontrivial
/// 2-torsion, so that the laws need not be degenerate.
pub fn condition1_eq2_instances<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    max_order: usize,
) -> Vec<Instance> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let group = random_group(rng, max_order);
        if out.len() % 2 == 0 && two_torsion(&group).order() == 1 {
            continue;
        }
        let Some(alpha) =
            random_automorphism_where(rng, &group, |a| check_condition1(a).unwrap_or(false))
        else {
            continue;
        };
        let (mu1, mu2) = eq2_pair(rng, &alpha);
        out.push(Instance {
            kind: InstanceKind::TorsionShifted,
            alpha,
            mu1,
            mu2,
        });
    }
    out
}
