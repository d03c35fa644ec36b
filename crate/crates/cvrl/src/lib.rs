//! Numerical toolkit for quantifying how far a continuous-variable quantum
//! state sits from the set of Gaussian states, working throughout on
//! truncated Fock spaces.
//!
//! The crate is organised around a single resource measure — the least
//! Gaussian-state weight that must be mixed into a state to make it Gaussian
//! — together with the machinery needed to estimate it, certify lower bounds
//! on it from few-copy measurements, and turn those certificates into
//! operational channel-discrimination advantages:
//!
//! * [`fock`] — dense operators on truncated Fock spaces: ladder operators,
//!   tensor products, permutation (swap / cyclic-shift) operators, norms,
//!   entropies and binary serialization.
//! * [`gaussian`] — Gaussian states in both parameter and moment form,
//!   synthesis of their truncated density matrices, Wigner functions and
//!   entropies.
//! * [`optimize`] — seeded, bounded Nelder–Mead with multistart, plus
//!   low-discrepancy sampling, used by every variational routine in the
//!   crate.
//! * [`robustness`] — max-relative entropy, relative entropy, and the
//!   robustness measure itself (fixed reference and optimized over the
//!   Gaussian family), multi-copy scaling, and a homodyne-only lower bound.
//! * [`witness`] — two- and four-copy polynomial witnesses built from swap
//!   and cyclic-shift operators, with soundness checks against the Gaussian
//!   set and the lower bounds they certify.
//! * [`discrimination`] — binary channel-discrimination tasks derived from a
//!   witness, in which the certified state provably beats every Gaussian
//!   probe.
//! * [`case_studies`] — closed forms and end-to-end pipelines for the two
//!   worked families: Fock states and balanced mixtures of opposite coherent
//!   states.

pub mod case_studies;
pub mod discrimination;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod optimize;
pub mod robustness;
pub mod witness;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex double-precision scalar used for every operator entry.
///
/// All entropic quantities in the crate (entropies, relative entropies,
/// max-relative entropies) are reported in nats.
pub type C64 = num_complex::Complex64;
