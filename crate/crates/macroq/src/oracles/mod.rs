//! Two independent brute-force routes used to validate the closed-form
//! engine: 2D Simpson quadrature on the phase plane, and truncated
//! Fock-basis linear algebra with the photon-loss Lindblad purity slope.
//! Agreement of both with the term algebra is the central correctness
//! argument of the crate.

mod fock;
mod grid;

pub use fock::{
    displacement_matrix, fock_purity_and_slope, fock_report, fock_report_auto, fock_state_matrix,
    fock_wigner_point, FockMatrix, FOCK_TAIL_LIMIT,
};
pub use grid::{auto_grid, grid_measures, GridSpec, GRID_POINTS_CAP};
