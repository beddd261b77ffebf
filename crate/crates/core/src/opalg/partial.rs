//! Partial transpose and partial trace over tensor factors.
//!
//! Basis indices are lexicographic with the first subsystem varying slowest.

use faer::Mat;

use super::{DensityMatrix, Operator};
use crate::{Error, Result, C64};

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// ρ^{T_k}: transpose on subsystem `subsystem` only.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<Operator> {
    partial_transpose_op(rho.operator(), subsystem)
}

/// Partial transpose of an arbitrary operator.
pub fn partial_transpose_op(op: &Operator, subsystem: usize) -> Result<Operator> {
    let dims = op.dims();
    if subsystem >= dims.len() {
        return Err(Error::SubsystemOutOfRange {
            index: subsystem,
            count: dims.len(),
        });
    }
    let stride = strides(dims)[subsystem];
    let d = dims[subsystem];
    let m = op.to_dense();
    let n = m.nrows();
    let out = Mat::<C64>::from_fn(n, n, |a, b| {
        let da = (a / stride) % d;
        let db = (b / stride) % d;
        let a2 = a - da * stride + db * stride;
        let b2 = b - db * stride + da * stride;
        m[(a2, b2)]
    });
    Operator::from_dense(dims.to_vec(), out)
}

/// Reduced state on the subsystems in `keep` (order of `keep` is ignored;
/// kept factors stay in their original order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let dims = rho.dims();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::SubsystemOutOfRange {
            index: bad,
            count: dims.len(),
        });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();

    let full_strides = strides(dims);
    let reduced_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let reduced_strides = strides(&reduced_dims);
    let digit = |idx: usize, k: usize| (idx / full_strides[k]) % dims[k];
    let reduce = |idx: usize| -> usize {
        kept.iter()
            .zip(&reduced_strides)
            .map(|(&k, &s)| digit(idx, k) * s)
            .sum()
    };

    let m = rho.matrix();
    let n = m.nrows();
    let nr: usize = reduced_dims.iter().product();
    let mut out = Mat::<C64>::zeros(nr, nr);
    for a in 0..n {
        for b in 0..n {
            if traced.iter().all(|&k| digit(a, k) == digit(b, k)) {
                out[(reduce(a), reduce(b))] += m[(a, b)];
            }
        }
    }
    Ok(DensityMatrix::from_dense_unchecked(reduced_dims, out))
}
