//! Simulation engine for dissipative preparation of entangled ground states
//! of Rydberg atoms.
//!
//! The crate is organized bottom-up:
//!
//! * [`opalg`]: operators, tensor products, partial transpose/trace, spectra
//!   and the vectorized Lindblad superoperator.
//! * [`model`]: single-atom and interaction Hamiltonians, the perturbative
//!   effective Hamiltonian, collapse operators and named target states.
//! * [`dynamics`]: the matrix-free master-equation right-hand side, RK4 and
//!   adaptive Dormand–Prince integration, and direct steady-state solves.
//! * [`metrics`]: negativity, fidelity, populations and stationarity residuals.
//! * [`experiments`]: parameter sweeps, figure pipelines and file formats.
//!
//! Units: time in µs, all energies and rates in rad/µs (ħ = 1).

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod opalg;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use opalg::{DensityMatrix, Liouvillian, Operator};
