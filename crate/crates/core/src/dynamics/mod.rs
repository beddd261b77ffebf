//! Master-equation dynamics: the matrix-free generator, Runge–Kutta
//! integration and direct steady-state solves.

mod evolve;
mod generator;
mod steady;
mod symmetric;
mod stepper;

pub use evolve::{
    evolve, evolve_generator, rk4_step_bound, EvolveOptions, Observable, Series,
    TrajectoryRecord, TRACE_DRIFT_LIMIT,
};
pub use generator::{lindblad_rhs, LindbladGenerator, MasterEquation, OdeSystem};
pub use steady::{steady_state, steady_state_of, SteadyState, RANK_TOL, STEADY_RESIDUAL_TOL};
pub use symmetric::SymmetricGenerator;
pub use stepper::{
    DormandPrince, Rk4, StepStats, StepperConfig, StepperKind, RK4_STABILITY_LIMIT,
};
