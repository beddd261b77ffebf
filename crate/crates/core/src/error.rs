use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid subsystem dimensions {dims:?} for a {size}x{size} matrix")]
    InvalidDims { dims: Vec<usize>, size: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("partial trace needs at least one subsystem to keep")]
    EmptyKeepSet,

    #[error("operator is not Hermitian (max |A - A^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("{0}")]
    FlavorMismatch(String),

    #[error("unknown state label `{0}`")]
    UnknownState(String),

    #[error("state `{name}` is defined for {expected} atoms, model has {found}")]
    AtomCountMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("negativity needs a bipartite state, got {0} subsystems")]
    NotBipartite(usize),

    #[error(
        "Hilbert dimension {dim} exceeds the superoperator limit {max}; \
         use long-time evolution instead"
    )]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("step cap of {steps} exceeded at t = {t} us")]
    StepCapExceeded { steps: u64, t: f64 },

    #[error("trace drifted by {drift:e} at t = {t} us; the step size is unstable")]
    TraceDrift { drift: f64, t: f64 },

    #[error("time step {dt} us exceeds the RK4 stability bound {bound} us")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("adaptive step size underflow at t = {t} us")]
    StepUnderflow { t: f64 },

    #[error("invalid stepper configuration: {0}")]
    InvalidStepper(String),

    #[error("steady-state solve failed: {0}")]
    Solver(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("cannot read `{path}`: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("unknown figure `{0}` (expected fig2, fig3, fig3-inset or fig4)")]
    UnknownFigure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::Read { .. }
                | Error::Json(_)
                | Error::InvalidSpec(_)
                | Error::FlavorMismatch(_)
                | Error::UnknownState(_)
                | Error::AtomCountMismatch { .. }
                | Error::UnknownFigure(_)
                | Error::InvalidStepper(_)
        )
    }
}
