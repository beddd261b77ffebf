//! Level ordering and multi-atom basis indexing.
//!
//! Single atom: (g_L, g_0, g_R, e_L, e_0, e_R). Multi-atom states are ordered
//! lexicographically with atom 1 varying slowest.

use std::fmt;

use crate::{Error, Result, C64};

pub const LEVELS_PER_ATOM: usize = 6;

/// Sub-level label shared by ground and Rydberg manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    L,
    Zero,
    R,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::L, Branch::Zero, Branch::R];

    pub fn index(self) -> usize {
        match self {
            Branch::L => 0,
            Branch::Zero => 1,
            Branch::R => 2,
        }
    }

    fn symbol(self) -> char {
        match self {
            Branch::L => 'L',
            Branch::Zero => '0',
            Branch::R => 'R',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Ground(Branch),
    Excited(Branch),
}

impl Level {
    pub const ALL: [Level; 6] = [
        Level::Ground(Branch::L),
        Level::Ground(Branch::Zero),
        Level::Ground(Branch::R),
        Level::Excited(Branch::L),
        Level::Excited(Branch::Zero),
        Level::Excited(Branch::R),
    ];

    pub fn index(self) -> usize {
        match self {
            Level::Ground(b) => b.index(),
            Level::Excited(b) => 3 + b.index(),
        }
    }

    pub fn from_index(i: usize) -> Level {
        Level::ALL[i]
    }

    pub fn branch(self) -> Branch {
        match self {
            Level::Ground(b) | Level::Excited(b) => b,
        }
    }

    pub fn is_excited(self) -> bool {
        matches!(self, Level::Excited(_))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let manifold = if self.is_excited() { 'e' } else { 'g' };
        write!(f, "{manifold}{}", self.branch().symbol())
    }
}

/// Parses labels such as `gLg0`, `g_L g_0`, `|e_Rg_L>` or `gL,gR`.
pub fn parse_levels(label: &str) -> Result<Vec<Level>> {
    let cleaned: Vec<char> = label
        .chars()
        .filter(|c| !matches!(c, '|' | '>' | '<' | '_' | ' ' | ',' | '⟩' | '⟨'))
        .collect();
    if cleaned.is_empty() || cleaned.len() % 2 != 0 {
        return Err(Error::UnknownState(label.to_string()));
    }
    cleaned
        .chunks(2)
        .map(|pair| {
            let branch = match pair[1] {
                'L' | 'l' => Branch::L,
                '0' => Branch::Zero,
                'R' | 'r' => Branch::R,
                _ => return Err(Error::UnknownState(label.to_string())),
            };
            match pair[0] {
                'g' | 'G' => Ok(Level::Ground(branch)),
                'e' | 'E' => Ok(Level::Excited(branch)),
                _ => Err(Error::UnknownState(label.to_string())),
            }
        })
        .collect()
}

pub fn format_levels(levels: &[Level]) -> String {
    levels.iter().map(|l| l.to_string()).collect()
}

/// Product basis of `atoms` six-level atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    atoms: usize,
}

impl BasisSpec {
    pub fn new(atoms: usize) -> Self {
        BasisSpec { atoms }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![LEVELS_PER_ATOM; self.atoms]
    }

    pub fn dim(&self) -> usize {
        LEVELS_PER_ATOM.pow(self.atoms as u32)
    }

    pub fn index(&self, levels: &[Level]) -> Result<usize> {
        if levels.len() != self.atoms {
            return Err(Error::AtomCountMismatch {
                name: format_levels(levels),
                expected: levels.len(),
                found: self.atoms,
            });
        }
        Ok(levels
            .iter()
            .fold(0, |acc, l| acc * LEVELS_PER_ATOM + l.index()))
    }

    pub fn levels(&self, mut index: usize) -> Vec<Level> {
        let mut out = vec![Level::Ground(Branch::L); self.atoms];
        for slot in out.iter_mut().rev() {
            *slot = Level::from_index(index % LEVELS_PER_ATOM);
            index /= LEVELS_PER_ATOM;
        }
        out
    }

    pub fn label(&self, index: usize) -> String {
        format_levels(&self.levels(index))
    }

    pub fn ket(&self, levels: &[Level]) -> Result<Vec<C64>> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[self.index(levels)?] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn excitation_count(&self, index: usize) -> usize {
        self.levels(index).iter().filter(|l| l.is_excited()).count()
    }

    /// Indices of states with every atom in the ground manifold.
    pub fn ground_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.excitation_count(i) == 0)
            .collect()
    }
}
