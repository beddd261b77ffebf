//! The six-level atom model: parameters, Hamiltonians, collapse operators and
//! target states for two or three atoms.

mod basis;
mod collapse;
mod effective;
mod hamiltonian;
mod spec;
mod targets;

pub use basis::{format_levels, parse_levels, BasisSpec, Branch, Level, LEVELS_PER_ATOM};
pub use collapse::{collapse_ops, decay_operator};
pub use effective::{
    effective_coupling, effective_drive_hamiltonian, effective_hamiltonian,
    effective_microwave_hamiltonian, effective_rabi,
};
pub use hamiltonian::{
    full_hamiltonian, hamiltonian, interaction_hamiltonian, microwave_hamiltonian,
    single_atom_hamiltonian,
};
pub use spec::{
    pumping_microwave, CollapseVariant, DriveConfig, Flavor, ModelConfig, ModelOverrides,
    ModelSpec, ScalarConfig, UTable, UTableConfig,
};
pub use targets::{target_state, TargetState};

pub(crate) use spec::{parse_config, read_config};
