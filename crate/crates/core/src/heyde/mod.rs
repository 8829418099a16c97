//! Executable forms of the characterization's conditions: the functional
//! equation for the characteristic functions (eq2), its consequence eq5,
//! and conditional symmetry of `L2` given `L1`, decided exactly on finite
//! groups or statistically on `R x F`.

pub mod exact;
pub mod grid;
pub mod mc;

use serde::Serialize;

pub use exact::{conditional_symmetry_exact, eq2_exact, eq5_exact, joint_law, SymmetryReport};
pub use grid::{eq2_grid, eq2_solenoid, eq5_grid, GridSpec, SolenoidGrid};
pub use mc::{conditional_symmetry_mc, McConfig, McReport};

/// Outcome of a residual sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub holds: bool,
    pub max_residual: f64,
    pub points_checked: usize,
    /// A maximising `(u, v)`, reported only when the check fails.
    pub witness: Option<(String, String)>,
}

impl ResidualReport {
    pub(crate) fn new(
        max_residual: f64,
        tol: f64,
        points_checked: usize,
        at: (String, String),
    ) -> Self {
        let holds = max_residual < tol;
        Self {
            holds,
            max_residual,
            points_checked,
            witness: (!holds).then_some(at),
        }
    }
}
