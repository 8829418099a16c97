//! Inputs shared by the benchmarks.

use heyde_core::dist::stream_rng;
use heyde_core::fuzz;
use heyde_core::{FiniteAbelianGroup, FiniteDist, Homomorphism};

/// A random automorphism and an eq2-passing pair on `Z(m1) x .. x Z(mk)`.
pub fn finite_instance(moduli: &[u64], seed: u64) -> (Homomorphism, FiniteDist, FiniteDist) {
    let g = FiniteAbelianGroup::new(moduli.to_vec()).expect("valid moduli");
    let mut rng = stream_rng(seed, 0);
    let alpha = fuzz::random_automorphism(&mut rng, &g);
    let (mu1, mu2) = fuzz::eq2_pair(&mut rng, &alpha);
    (alpha, mu1, mu2)
}
