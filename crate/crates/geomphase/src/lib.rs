//! Numerical laboratory for geometric phases accumulated by driven and
//! dissipative few-level quantum systems.
//!
//! The crate provides:
//!
//! - [`qcore`]: small dense complex linear algebra, a Hermitian eigensolver
//!   with branch tracking, an adaptive Runge–Kutta integrator and adaptive
//!   quadrature;
//! - [`phasefun`]: gauge-invariant phase functionals (Pancharatnam pair and
//!   chain phases, the kinematic geometric phase, the mixed-state phase built
//!   from density-matrix eigenbranches, trajectory and no-jump phases) and
//!   circular statistics over phase ensembles;
//! - [`spin_rotating`]: a spin-1/2 in a classical rotating magnetic field:
//!   exact propagator, closed-form phases, unitary spin-echo protocol;
//! - [`jc_model`]: the dissipative Jaynes–Cummings model on the truncated
//!   three-level basis, with open-system phase corrections;
//! - [`bipartite_vacuum`]: two qubits coupled to the electromagnetic vacuum
//!   with and without a perfectly conducting plane: environment coefficients,
//!   analytic dynamics, concurrence and phase corrections;
//! - [`dielectric_motion`]: an atom sliding at constant velocity above a lossy
//!   dielectric half-space: memory kernels, decoherence timescales, phase
//!   corrections and the vacuum-friction force integral;
//! - [`trajectories`]: quantum-jump Monte Carlo unraveling of the driven spin,
//!   phase and echo-fringe distributions, and the topological invariant of the
//!   no-jump trajectory.
//!
//! All frequencies, rates and times are dimensionless ratios against a
//! declared reference frequency (hbar = c = 1).




pub mod bipartite_vacuum;
pub mod dielectric_motion;
pub mod jc_model;
pub mod phasefun;
pub mod spin_rotating;
pub mod trajectories;
pub mod qcore;



pub use qcore::{CMat, CVec, DensityMatrix, C64};
