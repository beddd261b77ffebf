//! Operator algebra: storage, tensor products, partial operations, spectra
//! and superoperators.
//!
//! Operators are immutable once built and can be shared freely between
//! threads.

mod operator;
mod partial;
mod sparse;
mod spectral;
mod state;
mod superop;

pub use operator::{embed, kron, Operator, Storage, StorageKind, DENSE_MAX_DIM};
pub use partial::{partial_trace, partial_transpose, partial_transpose_op};
pub use sparse::CsrMatrix;
pub use spectral::{hermitian_eigenvalues, trace_norm_hermitian, HERMITIAN_TOL};
pub use state::{
    DensityMatrix, STATE_HERMITIAN_TOL, STATE_POSITIVITY_TOL, STATE_TRACE_TOL,
};
pub use superop::{liouvillian_matrix, unvectorize, vectorize, Liouvillian};
