use faer::Mat;

use super::{hermitian_eigenvalues, kron, Operator, StorageKind};
use crate::{Error, Result, C64};

/// Max entrywise |ρ - ρ†| accepted for a density matrix.
pub const STATE_HERMITIAN_TOL: f64 = 1e-12;
/// Accepted |Tr ρ - 1|.
pub const STATE_TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted as numerically nonnegative.
pub const STATE_POSITIVITY_TOL: f64 = -1e-8;

/// Hermitian, unit-trace, positive-semidefinite operator. Always dense.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: Operator,
    trace: f64,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants.
    pub fn new(op: Operator) -> Result<Self> {
        let op = op.into_storage(StorageKind::Dense);
        let deviation = op.hermiticity_deviation();
        if deviation > STATE_HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:e})"
            )));
        }
        let trace = op.trace().re;
        if (trace - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}")));
        }
        let min = hermitian_eigenvalues(&op)?[0];
        if min < STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(DensityMatrix { op, trace })
    }

    /// Skips the spectral check; callers guarantee the invariants.
    pub(crate) fn from_dense_unchecked(dims: Vec<usize>, m: Mat<C64>) -> Self {
        let trace = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
        let op = Operator::from_dense(dims, m).expect("caller checked dims");
        DensityMatrix { op, trace }
    }

    /// `|ψ><ψ|`, normalizing ψ.
    pub fn from_pure(dims: Vec<usize>, ket: &[C64]) -> Result<Self> {
        Self::mixture(dims, &[(1.0, ket.to_vec())])
    }

    /// Σ p_k |ψ_k><ψ_k| with weights renormalized to sum to one.
    pub fn mixture(dims: Vec<usize>, components: &[(f64, Vec<C64>)]) -> Result<Self> {
        let n: usize = dims.iter().product();
        let total: f64 = components.iter().map(|(p, _)| *p).sum();
        if components.is_empty() || total <= 0.0 || components.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::InvalidState(
                "mixture weights must be nonnegative with positive sum".into(),
            ));
        }
        let mut m = Mat::<C64>::zeros(n, n);
        for (p, ket) in components {
            if ket.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "state vector",
                    expected: n,
                    found: ket.len(),
                });
            }
            let norm2: f64 = ket.iter().map(|a| a.norm_sqr()).sum();
            if norm2 == 0.0 {
                return Err(Error::InvalidState("zero state vector".into()));
            }
            let w = p / total / norm2;
            for i in 0..n {
                if ket[i].norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += ket[i] * ket[j].conj() * w;
                }
            }
        }
        Operator::from_dense(dims.clone(), m.clone())?;
        Ok(Self::from_dense_unchecked(dims, m))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        let m = Mat::<C64>::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0 / n as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Operator::from_dense(dims.clone(), m.clone())?;
        Ok(Self::from_dense_unchecked(dims, m))
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn matrix(&self) -> Mat<C64> {
        self.op.to_dense()
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.op.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.op)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let m = self.op.to_dense();
        let mut acc = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                acc += m[(i, j)].norm_sqr();
            }
        }
        acc
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let op = kron(&self.op, &other.op).into_storage(StorageKind::Dense);
        let dims = op.dims().to_vec();
        Self::from_dense_unchecked(dims, op.to_dense())
    }

    /// `<ψ|ρ|ψ>` (complex; real for Hermitian ρ).
    pub fn expectation(&self, ket: &[C64]) -> Result<C64> {
        self.op.expectation(ket, ket)
    }
}
