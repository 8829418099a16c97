//! Checks of the Heyde-type characterization of Gaussian distributions on
//! locally compact abelian groups: finite groups with exact characters,
//! `R^d x F`, and a-adic solenoids.
//!
//! The crate is organised bottom-up:
//!
//! - [`group`]: finite abelian groups, homomorphisms, adjoints, annihilators.
//! - [`extended`]: `R^d x F`, solenoid character groups and truncations.
//! - [`dist`]: distributions, characteristic functions, samplers.
//! - [`heyde`]: the functional equations and conditional symmetry.
//! - [`structure`]: difference operators, `P`/`Q`, and factorisation.
//! - [`fuzz`]: seeded random instances.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dist;
pub mod error;
pub mod extended;
pub mod fuzz;
pub mod group;
pub mod heyde;
pub mod structure;

pub use dist::{
    dft, inverse_dft, FiniteCharFn, FiniteDist, FourierGaussCharFn, SolenoidGaussCharFn,
};
pub use error::{Error, Result};
pub use extended::{
    RealExtAutomorphism, RealExtGroup, SolenoidAutomorphism, SolenoidDualElement, SolenoidSpec,
};
pub use group::{
    annihilator, check_condition1, two_torsion, Element, FiniteAbelianGroup, Homomorphism, Subgroup,
};
pub use heyde::{GridSpec, McConfig, ResidualReport};
