//! Phase-space calculator for macroscopic-quantumness measures of
//! continuous-variable quantum states.
//!
//! The crate is organized around an exact complex-Gaussian term algebra
//! ([`algebra`]) that carries Wigner functions as finite term sums. On top of
//! it sit the state constructors ([`states`]), the purity-route measures
//! ([`measures`]), and two independent brute-force oracles ([`oracles`]):
//! 2D Simpson quadrature on the phase plane and truncated Fock-basis linear
//! algebra with the photon-loss Lindblad slope. The [`verify`] module bundles
//! the cross-route checks behind the `macroq verify` command.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod measures;
pub mod oracles;
pub mod poly;
pub mod states;
pub mod verify;

pub use algebra::{
    gaussian_moment, make_term, rep_eval, rep_grad_overlap, rep_integral, rep_overlap, term_diff,
    term_integral, term_mul, Axis, CVec2, GaussTerm, SymMat2, WignerRep,
};
pub use error::{Error, Result};
pub use measures::{chi_squared, measure_i, measure_i_plus, purity, purity_decay, report, MeasureReport, Method};
pub use states::{
    build, cat, coherent, coherent_dyad, displaced_thermal, fock, mixture, photon_thermal_mixture,
    sigma_interference, thermal_superposition, Parity, StateSpec,
};
