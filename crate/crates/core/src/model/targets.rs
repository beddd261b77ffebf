//! Named target states in the ground manifold.

use std::fmt;
use std::str::FromStr;

use super::basis::{format_levels, parse_levels, BasisSpec, Branch, Level};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TargetState {
    /// (|g_Lg_L> - |g_0g_0> + |g_Rg_R>)/√3
    Psi,
    /// (|g_Lg_L> + 2|g_0g_0> + |g_Rg_R>)/√6
    Phi,
    /// (|g_Lg_L> - |g_Rg_R>)/√2
    Upsilon,
    /// Totally antisymmetric three-atom singlet.
    S3,
    Product(Vec<Level>),
}

impl TargetState {
    pub fn name(&self) -> String {
        match self {
            TargetState::Psi => "psi".into(),
            TargetState::Phi => "phi".into(),
            TargetState::Upsilon => "upsilon".into(),
            TargetState::S3 => "s3".into(),
            TargetState::Product(levels) => format_levels(levels),
        }
    }

    /// Number of atoms the state is defined for.
    pub fn atoms(&self) -> usize {
        match self {
            TargetState::Psi | TargetState::Phi | TargetState::Upsilon => 2,
            TargetState::S3 => 3,
            TargetState::Product(levels) => levels.len(),
        }
    }

    /// Normalized state vector in the `atoms`-atom product basis.
    pub fn vector(&self, atoms: usize) -> Result<Vec<C64>> {
        target_state(self, atoms)
    }
}

impl fmt::Display for TargetState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for TargetState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psi" | "ψ" => Ok(TargetState::Psi),
            "phi" | "φ" => Ok(TargetState::Phi),
            "upsilon" | "υ" => Ok(TargetState::Upsilon),
            "s3" | "singlet" => Ok(TargetState::S3),
            _ => Ok(TargetState::Product(parse_levels(s)?)),
        }
    }
}

fn ground(levels: [Branch; 2]) -> Vec<Level> {
    levels.iter().map(|&b| Level::Ground(b)).collect()
}

/// Superposition of ground product states with real coefficients.
fn combination(basis: &BasisSpec, terms: &[(f64, Vec<Level>)]) -> Result<Vec<C64>> {
    let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
    for (c, levels) in terms {
        v[basis.index(levels)?] += C64::new(*c, 0.0);
    }
    Ok(v)
}

pub fn target_state(name: &TargetState, atoms: usize) -> Result<Vec<C64>> {
    if name.atoms() != atoms {
        return Err(Error::AtomCountMismatch {
            name: name.name(),
            expected: name.atoms(),
            found: atoms,
        });
    }
    let basis = BasisSpec::new(atoms);
    use Branch::{Zero, L, R};
    let s3 = 1.0 / 3f64.sqrt();
    let s6 = 1.0 / 6f64.sqrt();
    let s2 = 1.0 / 2f64.sqrt();
    match name {
        TargetState::Psi => combination(
            &basis,
            &[
                (s3, ground([L, L])),
                (-s3, ground([Zero, Zero])),
                (s3, ground([R, R])),
            ],
        ),
        TargetState::Phi => combination(
            &basis,
            &[
                (s6, ground([L, L])),
                (2.0 * s6, ground([Zero, Zero])),
                (s6, ground([R, R])),
            ],
        ),
        TargetState::Upsilon => {
            combination(&basis, &[(s2, ground([L, L])), (-s2, ground([R, R]))])
        }
        TargetState::S3 => {
            let g = |a, b, c| vec![Level::Ground(a), Level::Ground(b), Level::Ground(c)];
            combination(
                &basis,
                &[
                    (s6, g(Zero, L, R)),
                    (-s6, g(L, Zero, R)),
                    (-s6, g(R, L, Zero)),
                    (s6, g(L, R, Zero)),
                    (s6, g(R, Zero, L)),
                    (-s6, g(Zero, R, L)),
                ],
            )
        }
        TargetState::Product(levels) => basis.ket(levels),
    }
}
