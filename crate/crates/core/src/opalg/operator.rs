use faer::Mat;

use super::sparse::CsrMatrix;
use crate::{Error, Result, C64};

/// Operators on spaces up to this dimension are stored dense.
pub const DENSE_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageKind {
    Dense,
    Sparse,
}

impl StorageKind {
    /// Storage picked for a matrix of the given size.
    pub fn for_dim(dim: usize) -> Self {
        if dim <= DENSE_MAX_DIM {
            StorageKind::Dense
        } else {
            StorageKind::Sparse
        }
    }
}

#[derive(Debug, Clone)]
pub enum Storage {
    Dense(Mat<C64>),
    Sparse(CsrMatrix),
}

impl Storage {
    pub fn kind(&self) -> StorageKind {
        match self {
            Storage::Dense(_) => StorageKind::Dense,
            Storage::Sparse(_) => StorageKind::Sparse,
        }
    }

    pub fn nrows(&self) -> usize {
        match self {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(m) => m.nrows(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            Storage::Dense(m) => m[(i, j)],
            Storage::Sparse(m) => m.get(i, j),
        }
    }

    pub fn to_dense(&self) -> Mat<C64> {
        match self {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match self {
            Storage::Dense(m) => CsrMatrix::from_dense(m),
            Storage::Sparse(m) => m.clone(),
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Storage::Dense(m) => (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
                .collect(),
            Storage::Sparse(m) => m.mul_vec(x),
        }
    }
}

/// A complex square matrix tagged with its tensor-factor dimensions.
#[derive(Debug, Clone)]
pub struct Operator {
    dims: Vec<usize>,
    data: Storage,
}

fn check_dims(dims: &[usize], size: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != size {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            size,
        });
    }
    Ok(())
}

impl Operator {
    pub fn new(dims: Vec<usize>, data: Storage) -> Result<Self> {
        if let Storage::Dense(m) = &data {
            if m.nrows() != m.ncols() {
                return Err(Error::DimensionMismatch {
                    context: "square operator",
                    expected: m.nrows(),
                    found: m.ncols(),
                });
            }
        }
        if let Storage::Sparse(m) = &data {
            if m.nrows() != m.ncols() {
                return Err(Error::DimensionMismatch {
                    context: "square operator",
                    expected: m.nrows(),
                    found: m.ncols(),
                });
            }
        }
        check_dims(&dims, data.nrows())?;
        Ok(Operator { dims, data })
    }

    /// Builds an operator from triplets, choosing storage from the dimension.
    pub fn from_triplets(dims: Vec<usize>, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        let n: usize = dims.iter().product();
        check_dims(&dims, n)?;
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= n || *c >= n) {
            return Err(Error::DimensionMismatch {
                context: "triplet index",
                expected: n,
                found: r.max(c) + 1,
            });
        }
        let csr = CsrMatrix::from_triplets(n, n, triplets);
        Ok(Operator {
            dims,
            data: Storage::Sparse(csr),
        }
        .with_auto_storage())
    }

    pub fn from_dense(dims: Vec<usize>, m: Mat<C64>) -> Result<Self> {
        Operator::new(dims, Storage::Dense(m))
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        Operator::from_triplets(dims, &[])
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        let trip: Vec<_> = (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        Operator::from_triplets(dims, &trip)
    }

    /// `|ket><bra|`.
    pub fn outer(dims: Vec<usize>, ket: &[C64], bra: &[C64]) -> Result<Self> {
        let n: usize = dims.iter().product();
        for v in [ket, bra] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "outer product",
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let mut trip = Vec::new();
        for (i, a) in ket.iter().enumerate().filter(|(_, a)| a.norm() > 0.0) {
            for (j, b) in bra.iter().enumerate().filter(|(_, b)| b.norm() > 0.0) {
                trip.push((i, j, a * b.conj()));
            }
        }
        Operator::from_triplets(dims, &trip)
    }

    /// Re-stores the operator according to [`StorageKind::for_dim`].
    pub fn with_auto_storage(self) -> Self {
        let want = StorageKind::for_dim(self.dim());
        self.into_storage(want)
    }

    pub fn into_storage(self, kind: StorageKind) -> Self {
        if self.data.kind() == kind {
            return self;
        }
        let data = match kind {
            StorageKind::Dense => Storage::Dense(self.data.to_dense()),
            StorageKind::Sparse => Storage::Sparse(self.data.to_sparse()),
        };
        Operator {
            dims: self.dims,
            data,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn storage(&self) -> &Storage {
        &self.data
    }

    pub fn storage_kind(&self) -> StorageKind {
        self.data.kind()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data.get(i, j)
    }

    pub fn to_dense(&self) -> Mat<C64> {
        self.data.to_dense()
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        self.data.to_sparse()
    }

    /// Nonzero entries as (row, col, value).
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match &self.data {
            Storage::Sparse(m) => m.triplets(),
            Storage::Dense(m) => {
                let mut out = Vec::new();
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        let v = m[(i, j)];
                        if v != C64::new(0.0, 0.0) {
                            out.push((i, j, v));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.data {
            Storage::Sparse(m) => m.nnz(),
            Storage::Dense(_) => self.triplets().len(),
        }
    }

    fn same_shape(&self, other: &Operator, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Operator {
        let data = match &self.data {
            Storage::Dense(m) => Storage::Dense(m.adjoint().to_owned()),
            Storage::Sparse(m) => Storage::Sparse(m.adjoint()),
        };
        Operator {
            dims: self.dims.clone(),
            data,
        }
    }

    pub fn scale(&self, s: C64) -> Operator {
        let data = match &self.data {
            Storage::Dense(m) => Storage::Dense(Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
                m[(i, j)] * s
            })),
            Storage::Sparse(m) => Storage::Sparse(m.map_values(|v| v * s)),
        };
        Operator {
            dims: self.dims.clone(),
            data,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_shape(other, "operator sum")?;
        let data = match (&self.data, &other.data) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.add(b)),
            _ => Storage::Dense(self.to_dense() + other.to_dense()),
        };
        Ok(Operator {
            dims: self.dims.clone(),
            data,
        }
        .with_auto_storage())
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.same_shape(other, "operator product")?;
        let data = match (&self.data, &other.data) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.matmul(b)),
            _ => Storage::Dense(self.to_dense() * other.to_dense()),
        };
        Ok(Operator {
            dims: self.dims.clone(),
            data,
        }
        .with_auto_storage())
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "operator-vector product",
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.data.mul_vec(x))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise |A - A^dag|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, j, v) in self.triplets() {
            worst = worst.max((v - self.get(j, i).conj()).norm());
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.triplets().iter().all(|(_, _, v)| v.im == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.same_shape(other, "operator comparison")?;
        let a = self.to_dense();
        let b = other.to_dense();
        let mut worst = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        Ok(worst)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.triplets()
            .iter()
            .map(|(_, _, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<bra|A|ket>`.
    pub fn expectation(&self, bra: &[C64], ket: &[C64]) -> Result<C64> {
        let ax = self.apply(ket)?;
        if bra.len() != ax.len() {
            return Err(Error::DimensionMismatch {
                context: "expectation value",
                expected: ax.len(),
                found: bra.len(),
            });
        }
        Ok(bra.iter().zip(&ax).map(|(b, a)| b.conj() * a).sum())
    }
}

/// Tensor product `a ⊗ b`; result dims are the concatenation of the inputs.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let n = a.dim() * b.dim();
    let data = match StorageKind::for_dim(n) {
        StorageKind::Dense => {
            let (ad, bd) = (a.to_dense(), b.to_dense());
            let nb = bd.nrows();
            Storage::Dense(Mat::from_fn(n, n, |i, j| {
                ad[(i / nb, j / nb)] * bd[(i % nb, j % nb)]
            }))
        }
        StorageKind::Sparse => Storage::Sparse(a.to_sparse().kron(&b.to_sparse())),
    };
    Operator { dims, data }
}

/// Embeds a single-subsystem operator at position `site` of `dims`, with
/// identities elsewhere.
pub fn embed(local: &Operator, site: usize, dims: &[usize]) -> Result<Operator> {
    if site >= dims.len() {
        return Err(Error::SubsystemOutOfRange {
            index: site,
            count: dims.len(),
        });
    }
    if local.dim() != dims[site] {
        return Err(Error::DimensionMismatch {
            context: "embedded operator",
            expected: dims[site],
            found: local.dim(),
        });
    }
    let mut out: Option<Operator> = None;
    for (k, &d) in dims.iter().enumerate() {
        let factor = if k == site {
            local.clone()
        } else {
            Operator::identity(vec![d])?
        };
        out = Some(match out {
            None => factor,
            Some(acc) => kron(&acc, &factor),
        });
    }
    Ok(out.unwrap().with_auto_storage())
}
