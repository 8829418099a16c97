//! Monte Carlo test of conditional symmetry on `R x F`.
//!
//! Draws `(L1, L2) = (xi1 + xi2, xi1 + alpha xi2)` and compares the counts of
//! every bin `B` of the `(L1, L2)` space with those of its mirror
//! `sigma B = {(l1, -l2)}`. Under symmetry each pair of counts splits
//! binomially with probability 1/2, so
//! `sum (n_B - n_sigmaB)^2 / (n_B + n_sigmaB)` over mirror pairs is
//! approximately chi-square with one degree of freedom per pair. The bin
//! edges depend on the sample only through `L1` and `|L2|`, which the
//! mirror leaves unchanged.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dist::{stream_rng, FourierGaussCharFn, RealExtSampler};
use crate::error::{Error, Result};
use crate::extended::RealExtAutomorphism;

/// Significance level of the decision.
pub const MC_LEVEL: f64 = 0.01;
/// Pairs whose expected count per side is below this are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    /// Quantile bins on the real part of `L1`; `|L2|` gets half as many
    /// magnitude bins, each split by sign.
    pub bins: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            bins: 32,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub samples: usize,
    pub mirror_pairs: usize,
    /// Mirror pairs merged into one pooled pair for low counts.
    pub pooled_pairs: usize,
    pub degrees_of_freedom: usize,
    pub statistic: f64,
    pub p_value: f64,
    /// `p_value > 0.01`
    pub consistent: bool,
}

fn quantile_edges(mut values: Vec<f64>, bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut edges: Vec<f64> = (1..bins)
        .map(|k| values[(k * n / bins).min(n - 1)])
        .collect();
    edges.dedup();
    edges
}

fn bin_of(edges: &[f64], x: f64) -> usize {
    edges.partition_point(|&e| e <= x)
}

pub fn conditional_symmetry_mc(
    c1: &FourierGaussCharFn,
    c2: &FourierGaussCharFn,
    alpha: &RealExtAutomorphism,
    config: &McConfig,
) -> Result<McReport> {
    if c1.group() != c2.group() || alpha.group() != c1.group() {
        return Err(Error::structural(
            "laws and automorphism on different groups",
        ));
    }
    if c1.group().real_dim() != 1 {
        return Err(Error::structural("Monte Carlo symmetry test needs R x F"));
    }
    if config.samples == 0 || config.workers == 0 || config.bins < 2 {
        return Err(Error::domain("need samples > 0, workers > 0 and bins >= 2"));
    }
    let s1 = RealExtSampler::new(c1)?;
    let s2 = RealExtSampler::new(c2)?;
    let f = c1.group().finite();
    let a = alpha.real()[0];
    let ag = alpha.finite().table();

    let per = config.samples / config.workers;
    let extra = config.samples % config.workers;
    let shards: Vec<Vec<(f64, usize, f64, usize)>> = (0..config.workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = stream_rng(config.seed, w as u64);
            let count = per + usize::from(w < extra);
            (0..count)
                .map(|_| {
                    let (t1, g1) = s1.sample(&mut rng);
                    let (t2, g2) = s2.sample(&mut rng);
                    (
                        t1 + t2,
                        f.add_idx(g1, g2),
                        t1 + a * t2,
                        f.add_idx(g1, ag[g2]),
                    )
                })
                .collect()
        })
        .collect();
    let draws: Vec<_> = shards.into_iter().flatten().collect();

    let l1_edges = quantile_edges(draws.iter().map(|d| d.0).collect(), config.bins);
    let mag: Vec<f64> = draws
        .iter()
        .map(|d| d.2.abs())
        .filter(|&x| x > 0.0)
        .collect();
    let l2_edges = if mag.is_empty() {
        Vec::new()
    } else {
        quantile_edges(mag, (config.bins / 2).max(1))
    };

    // cell = (l1 bin, l1 finite, signed l2 bin, l2 finite); the signed bin is
    // 0 for l2 == 0 and +-(1 + magnitude bin) otherwise
    let mut counts: HashMap<(usize, usize, i64, usize), u64> = HashMap::new();
    for &(x1, g1, x2, g2) in &draws {
        let signed = if x2 == 0.0 {
            0
        } else {
            let m = bin_of(&l2_edges, x2.abs()) as i64 + 1;
            if x2 > 0.0 {
                m
            } else {
                -m
            }
        };
        *counts
            .entry((bin_of(&l1_edges, x1), g1, signed, g2))
            .or_default() += 1;
    }

    let mut keys: Vec<_> = counts.keys().copied().collect();
    keys.sort_unstable();
    let mut pairs = Vec::new();
    for k in keys {
        let mirror = (k.0, k.1, -k.2, f.neg_idx(k.3));
        if mirror == k {
            continue;
        }
        // visit each unordered pair once, from its larger key
        if counts.contains_key(&mirror) && mirror > k {
            continue;
        }
        let n_b = counts[&k];
        let n_m = counts.get(&mirror).copied().unwrap_or(0);
        pairs.push((n_b, n_m));
    }

    let mut statistic = 0.0;
    let mut df = 0;
    let (mut pooled_b, mut pooled_m, mut pooled) = (0u64, 0u64, 0usize);
    for &(b, m) in &pairs {
        let total = (b + m) as f64;
        if total / 2.0 < MIN_EXPECTED {
            pooled_b += b;
            pooled_m += m;
            pooled += 1;
        } else {
            statistic += (b as f64 - m as f64).powi(2) / total;
            df += 1;
        }
    }
    let pooled_total = (pooled_b + pooled_m) as f64;
    if pooled_total / 2.0 >= MIN_EXPECTED {
        statistic += (pooled_b as f64 - pooled_m as f64).powi(2) / pooled_total;
        df += 1;
    }

    let p_value = if df == 0 {
        1.0
    } else {
        ChiSquared::new(df as f64)
            .map_err(|e| Error::domain(e.to_string()))?
            .sf(statistic)
    };
    Ok(McReport {
        samples: draws.len(),
        mirror_pairs: pairs.len(),
        pooled_pairs: pooled,
        degrees_of_freedom: df,
        statistic,
        p_value,
        consistent: p_value > MC_LEVEL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::FiniteDist;
    use crate::extended::RealExtGroup;
    use crate::group::{FiniteAbelianGroup, Homomorphism};

    #[test]
    fn degenerate_pair_is_trivially_consistent() {
        let g = RealExtGroup::new(1, FiniteAbelianGroup::cyclic(2).unwrap()).unwrap();
        let e0 = FourierGaussCharFn::from_finite(
            &g,
            &FiniteDist::point(g.finite(), &g.finite().zero()).unwrap(),
        )
        .unwrap();
        let alpha =
            RealExtAutomorphism::scalar(&g, -2.0, Homomorphism::identity(g.finite())).unwrap();
        let cfg = McConfig {
            samples: 1000,
            ..Default::default()
        };
        let r = conditional_symmetry_mc(&e0, &e0, &alpha, &cfg).unwrap();
        assert!(r.consistent);
        assert_eq!(r.degrees_of_freedom, 0);
    }

    #[test]
    fn deterministic_given_seed_and_workers() {
        let c1 = FourierGaussCharFn::remark31_family(2.0, 1.0, 0.5).unwrap();
        let c2 = FourierGaussCharFn::remark31_family(1.0, 0.5, 0.5).unwrap();
        let alpha = RealExtAutomorphism::scalar(
            c1.group(),
            -2.0,
            Homomorphism::identity(c1.group().finite()),
        )
        .unwrap();
        let cfg = McConfig {
            samples: 20_000,
            bins: 8,
            seed: 11,
            workers: 3,
        };
        let a = conditional_symmetry_mc(&c1, &c2, &alpha, &cfg).unwrap();
        let b = conditional_symmetry_mc(&c1, &c2, &alpha, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn detects_shifted_asymmetry() {
        // b1 + a b2 != 0: L2 has nonzero mean given L1
        let c1 = FourierGaussCharFn::real_gauss(1.0, 0.5).unwrap();
        let c2 = FourierGaussCharFn::real_gauss(1.0, 0.0).unwrap();
        let alpha = RealExtAutomorphism::scalar(
            c1.group(),
            -1.0,
            Homomorphism::identity(c1.group().finite()),
        )
        .unwrap();
        let cfg = McConfig {
            samples: 50_000,
            bins: 8,
            seed: 5,
            workers: 2,
        };
        let r = conditional_symmetry_mc(&c1, &c2, &alpha, &cfg).unwrap();
        assert!(!r.consistent, "{r:?}");
    }
}
