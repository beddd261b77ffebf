//! Superoperator form of the Lindblad generator.
//!
//! Vectorization is column-stacking: `vec(ρ)[i + j·D] = ρ[i, j]`, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use faer::Mat;

use super::{CsrMatrix, Operator, Storage, StorageKind};
use crate::{Error, Result, C64};

/// Column-stacked vector of an operator.
pub fn vectorize(op: &Operator) -> Vec<C64> {
    let m = op.to_dense();
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[C64], dims: &[usize]) -> Result<Operator> {
    let n: usize = dims.iter().product();
    if v.len() != n * n {
        return Err(Error::DimensionMismatch {
            context: "unvectorize",
            expected: n * n,
            found: v.len(),
        });
    }
    Operator::from_dense(dims.to_vec(), Mat::from_fn(n, n, |i, j| v[i + j * n]))
}

/// Matrix `S` with `S·vec(ρ) = vec(-i[H,ρ] + Σ LρL† - ½{L†L,ρ})`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dims: Vec<usize>,
    hilbert_dim: usize,
    data: Storage,
}

impl Liouvillian {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Size of the superoperator (D²).
    pub fn dim(&self) -> usize {
        self.hilbert_dim * self.hilbert_dim
    }

    pub fn storage(&self) -> &Storage {
        &self.data
    }

    pub fn storage_kind(&self) -> StorageKind {
        self.data.kind()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data.get(row, col)
    }

    pub fn to_dense(&self) -> Mat<C64> {
        self.data.to_dense()
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "Liouvillian action",
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self.data.mul_vec(v))
    }

    pub fn apply_operator(&self, rho: &Operator) -> Result<Operator> {
        let out = self.apply(&vectorize(rho))?;
        unvectorize(&out, &self.dims)
    }
}

pub fn liouvillian_matrix(h: &Operator, collapse: &[Operator]) -> Result<Liouvillian> {
    let d = h.dim();
    for l in collapse {
        if l.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "collapse operator",
                expected: d,
                found: l.dim(),
            });
        }
    }
    let id = CsrMatrix::identity(d);
    let minus_i = C64::new(0.0, -1.0);
    let hs = h.to_sparse();

    let mut trip: Vec<(usize, usize, C64)> = Vec::new();
    let mut push = |m: CsrMatrix, scale: C64| {
        trip.extend(m.iter().map(|(r, c, v)| (r, c, v * scale)));
    };
    push(id.kron(&hs), minus_i);
    push(hs.transpose().kron(&id), -minus_i);
    for l in collapse {
        let ls = l.to_sparse();
        let ldl = ls.adjoint().matmul(&ls);
        push(ls.map_values(|v| v.conj()).kron(&ls), C64::new(1.0, 0.0));
        push(id.kron(&ldl), C64::new(-0.5, 0.0));
        push(ldl.transpose().kron(&id), C64::new(-0.5, 0.0));
    }
    let csr = CsrMatrix::from_triplets(d * d, d * d, &trip);
    let data = match StorageKind::for_dim(d) {
        StorageKind::Dense => Storage::Dense(csr.to_dense()),
        StorageKind::Sparse => Storage::Sparse(csr),
    };
    Ok(Liouvillian {
        dims: h.dims().to_vec(),
        hilbert_dim: d,
        data,
    })
}
