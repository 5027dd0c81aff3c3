//! Complex small-dense linear algebra, quantum state containers,
//! eigen-decomposition with continuity tracking, adaptive ODE integration and
//! adaptive quadrature.
//!
//! All types are immutable values after construction and all operations are
//! pure functions; they are safe to call from concurrent workers without
//! synchronization.

mod eig;
mod linalg;
mod ode;
pub mod quad;

pub use eig::{eig_hermitian, track_branches, EigTracked};
pub use linalg::{pauli, CMat, CVec, DensityMatrix};
pub use ode::{integrate_ode, OdeCtrl};

pub type C64 = num_complex::Complex64;

/// Errors raised by the numerical core.
#[derive(Debug, thiserror::Error)]
pub enum QcoreError {
    #[error("matrix is not Hermitian: max |M - M^dag| = {0:.3e}")]
    NonHermitianInput(f64),
    #[error("ambiguous branch assignment between snapshots {step} and {}: overlap margin {margin:.3e}", step + 1)]
    AmbiguousBranch { step: usize, margin: f64 },
    #[error("required step size {h:.3e} fell below 1e-15 of the span {span:.3e}")]
    StepSizeUnderflow { h: f64, span: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),
}
