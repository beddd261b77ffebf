//! Rotating-frame Hamiltonians of the driven multi-level atoms.

use super::basis::{BasisSpec, Branch, Level, LEVELS_PER_ATOM};
use super::effective::effective_hamiltonian;
use super::spec::{Flavor, ModelSpec};
use crate::opalg::{embed, Operator};
use crate::{Result, C64};

/// Ground-state microwave couplings of one atom.
fn microwave_triplets(spec: &ModelSpec) -> Vec<(usize, usize, C64)> {
    let gl = Level::Ground(Branch::L).index();
    let g0 = Level::Ground(Branch::Zero).index();
    let gr = Level::Ground(Branch::R).index();
    let [w_l0, w_0r] = spec.microwave;
    vec![
        (gl, g0, w_l0),
        (g0, gl, w_l0.conj()),
        (g0, gr, w_0r),
        (gr, g0, w_0r.conj()),
    ]
}

/// The 6×6 single-atom Hamiltonian: microwave couplings between neighbouring
/// ground levels, laser couplings Ω_i between g_i and e_i, and -Δ on every
/// Rydberg level.
pub fn single_atom_hamiltonian(spec: &ModelSpec) -> Operator {
    let mut trip = microwave_triplets(spec);
    for b in Branch::ALL {
        let g = Level::Ground(b).index();
        let e = Level::Excited(b).index();
        let omega = spec.omega_drive[b.index()];
        trip.push((g, e, omega));
        trip.push((e, g, omega.conj()));
        trip.push((e, e, C64::new(-spec.delta, 0.0)));
    }
    Operator::from_triplets(vec![LEVELS_PER_ATOM], &trip).expect("6x6 triplets")
}

/// Microwave part of the single-atom Hamiltonian, summed over all atoms.
pub fn microwave_hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    let local = Operator::from_triplets(vec![LEVELS_PER_ATOM], &microwave_triplets(spec))?;
    sum_over_atoms(&local, spec)
}

fn sum_over_atoms(local: &Operator, spec: &ModelSpec) -> Result<Operator> {
    let dims = spec.dims();
    let mut total = Operator::zeros(dims.clone())?;
    for site in 0..spec.atoms {
        total = total.add(&embed(local, site, &dims)?)?;
    }
    Ok(total)
}

/// Rydberg interaction Σ_{pairs} Σ_ij 𝒰_ij |e_i><e_i| ⊗ |e_j><e_j|. For three
/// atoms the pair terms are added over all three pairs.
pub fn interaction_hamiltonian(spec: &ModelSpec) -> Operator {
    let basis = BasisSpec::new(spec.atoms);
    let mut trip = Vec::new();
    for idx in 0..basis.dim() {
        let levels = basis.levels(idx);
        let mut energy = 0.0;
        for a in 0..levels.len() {
            for b in a + 1..levels.len() {
                if let (Level::Excited(i), Level::Excited(j)) = (levels[a], levels[b]) {
                    energy += spec.u_table.get(i, j);
                }
            }
        }
        if energy != 0.0 {
            trip.push((idx, idx, C64::new(energy, 0.0)));
        }
    }
    Operator::from_triplets(basis.dims(), &trip).expect("diagonal triplets")
}

/// Σ_n H_n (embedded) + V.
pub fn full_hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    let h1 = single_atom_hamiltonian(spec);
    sum_over_atoms(&h1, spec)?.add(&interaction_hamiltonian(spec))
}

/// Hamiltonian for the spec's flavor.
pub fn hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    spec.validate()?;
    match spec.flavor {
        Flavor::Full => full_hamiltonian(spec),
        Flavor::Effective => effective_hamiltonian(spec),
    }
}
