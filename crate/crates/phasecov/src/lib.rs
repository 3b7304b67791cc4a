//! # phasecov
//!
//! Single-qubit phase-covariant channel dynamics and quantum-speed-limit
//! analysis.
//!
//! A phase-covariant qubit channel combines energy gain, energy loss and pure
//! dephasing, with rates `γ₁(t)`, `γ₂(t)`, `γ₃(t)` and a precession frequency
//! `ω`. The library provides:
//!
//! - [`state`]: exact 2×2 state algebra (populations, coherence, norms,
//!   super-fidelity, Bures angles, coherence–mixedness trade-off).
//! - [`channels`]: a catalog of noise models (non-Markovian amplitude damping,
//!   random telegraph noise, Ornstein–Uhlenbeck dephasing and its Markovian
//!   limit, a finite-temperature phenomenological model, the eternally
//!   CP-indivisible family, generalized amplitude damping) with exact state
//!   evolution through the accumulated map integrals.
//! - [`qsl`]: geometric quantum-speed-limit times for pure and mixed initial
//!   states, with operator / Hilbert–Schmidt / trace norm functionals and the
//!   Holevo rate bound.
//! - [`nonmarkov`]: the temporal self-similarity measure of non-Markovianity,
//!   built on the vectorized generator and a derivative-free minimization over
//!   constant semigroup generators.
//! - [`action`]: the action quantum speed limit for generalized amplitude
//!   damping, with a monotone path optimizer and its Cauchy–Schwarz oracle.
//! - [`quad`]: adaptive Gauss–Kronrod quadrature used throughout.
//!
//! All types are immutable values and all operations are pure functions, so
//! parameter sweeps parallelize trivially.

pub mod action;
pub mod channels;
pub mod nonmarkov;
pub mod qsl;
pub mod quad;
pub mod state;

pub use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by state construction, channel evaluation and the
/// numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Positivity violation beyond the repairable tolerance.
    #[error("state is not positive semidefinite (defect {defect:.3e})")]
    NotPositive { defect: f64 },
    /// Bloch vector outside the unit ball.
    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNormTooLarge { norm: f64 },
    /// A matrix expected to be Hermitian is not.
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    /// An operation requiring a pure state received a mixed one.
    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },
    /// Channel parameters violate their constraints.
    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),
    /// An instantaneous rate diverges at (or within 1e-9 of) the given time.
    #[error("rate diverges near t = {t}")]
    SingularRate { t: f64 },
    /// Adaptive quadrature exhausted its subdivision budget; the offending
    /// subinterval is reported.
    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64 },
    /// An integrand exceeded the divergence guard.
    #[error("integrand diverges near t = {t}")]
    DivergentIntegrand { t: f64 },
    /// The purity factor in the mixed-state bound becomes singular.
    #[error("purity reaches 1 at t = {t} while the initial state is mixed")]
    PuritySingularity { t: f64 },
    /// The channel has no scalar decoherence function.
    #[error("channel has no scalar decoherence function")]
    NoDecoherenceFunction,
    /// A control path violates its constraints.
    #[error("invalid control path: {0}")]
    InvalidPath(String),
    /// Generic parameter validation failure.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// The action vanished, so the action speed-limit time is undefined.
    #[error("action is zero; the speed-limit time is unbounded")]
    ZeroAction,
    /// The speed-limit time vanished, so the Holevo rate bound is unbounded.
    #[error("speed-limit time is zero; the rate bound is unbounded")]
    InfiniteBound,
}

pub type Result<T> = std::result::Result<T, Error>;
