//! Entanglement and quality measures of a state.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::lindblad_rhs;
use crate::model::{collapse_ops, hamiltonian, BasisSpec, ModelSpec, TargetState, LEVELS_PER_ATOM};
use crate::opalg::{partial_transpose, trace_norm_hermitian, DensityMatrix};
use crate::{Error, Result, C64};

/// Largest imaginary part tolerated in <ψ|ρ|ψ>.
pub const FIDELITY_IMAG_TOL: f64 = 1e-12;

/// (‖ρ^{T_k}‖₁ - 1)/2 for a two-party state.
pub fn negativity(rho: &DensityMatrix, subsystem: usize) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::NotBipartite(rho.dims().len()));
    }
    let pt = partial_transpose(rho, subsystem)?;
    Ok((trace_norm_hermitian(&pt)? - 1.0) / 2.0)
}

/// <ψ|ρ|ψ> for a normalized target ψ.
pub fn fidelity_pure(rho: &DensityMatrix, target: &[C64]) -> Result<f64> {
    let f = rho.expectation(target)?;
    if f.im.abs() > FIDELITY_IMAG_TOL {
        return Err(Error::InvalidState(format!(
            "fidelity has imaginary part {:e}",
            f.im
        )));
    }
    Ok(f.re)
}

fn atom_count(rho: &DensityMatrix) -> Result<usize> {
    let dims = rho.dims();
    if dims.iter().any(|&d| d != LEVELS_PER_ATOM) {
        return Err(Error::InvalidState(format!(
            "expected six-level atoms, got dims {dims:?}"
        )));
    }
    Ok(dims.len())
}

/// Population of each labelled state, in the order given.
pub fn populations(rho: &DensityMatrix, labels: &[TargetState]) -> Result<Vec<(String, f64)>> {
    let atoms = atom_count(rho)?;
    labels
        .iter()
        .map(|t| Ok((t.name(), fidelity_pure(rho, &t.vector(atoms)?)?)))
        .collect()
}

/// Total weight on states with every atom in a ground level.
pub fn ground_population(rho: &DensityMatrix) -> Result<f64> {
    let basis = BasisSpec::new(atom_count(rho)?);
    Ok(basis.ground_indices().iter().map(|&i| rho.get(i, i).re).sum())
}

/// Frobenius norm of the master-equation right-hand side at ρ.
pub fn steady_residual(spec: &ModelSpec, rho: &DensityMatrix) -> Result<f64> {
    let rhs = lindblad_rhs(&hamiltonian(spec)?, &collapse_ops(spec)?, rho)?;
    Ok(rhs.frobenius_norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Only defined for two atoms.
    pub negativity: Option<f64>,
    pub fidelity: BTreeMap<String, f64>,
    pub populations: BTreeMap<String, f64>,
    pub purity: f64,
}

impl MetricReport {
    /// Fidelity against each target, plus the populations of the targets and
    /// of the whole ground manifold.
    pub fn evaluate(rho: &DensityMatrix, targets: &[TargetState]) -> Result<Self> {
        let negativity = if rho.dims().len() == 2 {
            Some(negativity(rho, 0)?)
        } else {
            None
        };
        let fid = populations(rho, targets)?;
        let mut pops: BTreeMap<String, f64> = fid.iter().cloned().collect();
        pops.insert("ground".into(), ground_population(rho)?);
        Ok(MetricReport {
            negativity,
            fidelity: fid.into_iter().collect(),
            populations: pops,
            purity: rho.purity(),
        })
    }
}
