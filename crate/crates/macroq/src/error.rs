//! Error types shared by the term algebra, state constructors, measures and oracles.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The real part of a quadratic form is not positive definite, so the
    /// term cannot be integrated over the plane.
    #[error("NonIntegrable: {0}")]
    NonIntegrable(String),

    /// A polynomial operation would exceed the supported total degree.
    #[error("DegreeOverflow: total degree {degree} exceeds the cap {max}")]
    DegreeOverflow { degree: usize, max: usize },

    /// det A underflowed; the Gaussian normalization 1/sqrt(det A) is unusable.
    #[error("SingularMatrix: |det A| = {det_abs:.3e} is below 1e-30")]
    SingularMatrix { det_abs: f64 },

    /// A quantity that must be real for a hermitian representation came out
    /// with a significant imaginary residual.
    #[error("HermiticityViolation: {0}")]
    HermiticityViolation(String),

    /// Thermal variance below the vacuum limit V = 1.
    #[error("InvalidVariance: V must be >= 1, got {0}")]
    InvalidVariance(f64),

    /// A state reduced to (numerical) zero, e.g. an odd cat at beta ~ 0.
    #[error("DegenerateState: {0}")]
    DegenerateState(String),

    /// Mixture weights are negative or do not sum to one.
    #[error("WeightError: {0}")]
    WeightError(String),

    /// Computed purity fell outside (0, 1 + 1e-9].
    #[error("PurityOutOfRange: purity {0} outside (0, 1 + 1e-9]")]
    PurityOutOfRange(f64),

    /// The representation does not integrate to one; measures require a
    /// trace-normalized state.
    #[error("NotNormalized: integral of W is {0}, expected 1")]
    NotNormalized(f64),

    /// Truncated Fock-basis probability mass too large for the requested use.
    #[error("TailTooLarge: truncated probability {tail:.3e} exceeds {limit:.1e}; raise n_max or shrink V")]
    TailTooLarge { tail: f64, limit: f64 },

    /// The feature-resolving grid would need more points per axis than the cap;
    /// use the closed form instead.
    #[error("InfeasibleGrid: {required} points per axis exceed the cap {cap}")]
    InfeasibleGrid { required: usize, cap: usize },

    /// A state specification is structurally invalid for the requested operation.
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),

    /// Two algebraically identical computation routes disagreed; this signals
    /// an engine defect, never a bad input.
    #[error("InternalCheck: {0}")]
    InternalCheck(String),
}
