//! Crate-wide error type.

use crate::gaussian::GaussianParams;

/// Everything that can go wrong across the crate.
///
/// Variants carry enough context to be actionable: dimensions that clashed,
/// the cutoff that was too small, or the offending Gaussian parameters when a
/// certificate of failure exists.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An operator was requested with a cutoff too small to mean anything.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// The requested tensor power would overflow memory or `usize`.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Two operators that had to share (cutoff, modes) did not.
    #[error("dimension mismatch: {left} vs {right} ({context})")]
    DimensionMismatch {
        /// Dimension signature of the left operand, e.g. "cutoff 8, 2 modes".
        left: String,
        /// Dimension signature of the right operand.
        right: String,
        /// What was being attempted.
        context: String,
    },

    /// A matrix that had to be a density operator failed validation
    /// (non-Hermitian, negative eigenvalue beyond tolerance, or wrong trace).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A Fock-space cutoff is too small for the requested synthesis to be
    /// trustworthy; carries the smallest acceptable cutoff.
    #[error("cutoff {got} too small: need at least {need} ({context})")]
    CutoffTooSmall {
        /// Cutoff that was supplied.
        got: usize,
        /// Minimal cutoff the energy guard requires.
        need: usize,
        /// What was being synthesized.
        context: String,
    },

    /// A covariance matrix violates the uncertainty principle.
    #[error("covariance matrix is not a bona fide quantum covariance: {0}")]
    NotBonaFide(String),

    /// A covariance matrix was numerically singular where an inverse was
    /// needed (Wigner functions, moment matching).
    #[error("singular covariance matrix: {0}")]
    SingularCovariance(String),

    /// Every optimizer start diverged to an infeasible point.
    #[error("no feasible Gaussian reference found: {0}")]
    NoFeasibleReference(String),

    /// The state is numerically indistinguishable from a Gaussian state, so
    /// no meaningful witness offset can be extracted.
    #[error("state is indistinguishable from a Gaussian state (closest squared distance {distance:.3e})")]
    IndistinguishableFromGaussian {
        /// Smallest squared Hilbert–Schmidt distance found.
        distance: f64,
    },

    /// Adversarial search found a Gaussian state on which a would-be witness
    /// goes negative; carries the offending parameters as a certificate.
    #[error("witness soundness violated: expectation {value:.3e} on a Gaussian state")]
    WitnessUnsound {
        /// Expectation value of the witness on the violating Gaussian state.
        value: f64,
        /// Parameters of the violating Gaussian state.
        certificate: GaussianParams,
    },

    /// Binary (de)serialization failure: bad magic, truncated payload, or an
    /// underlying I/O error.
    #[error("serialization error: {0}")]
    Serialization(String),

    /// A LAPACK call failed to converge or returned an error code.
    #[error("linear algebra backend error: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
