//! Direct steady-state solve of the vectorized master equation.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::model::{collapse_ops, hamiltonian, ModelSpec};
use crate::opalg::{
    liouvillian_matrix, DensityMatrix, Operator, DENSE_MAX_DIM, STATE_POSITIVITY_TOL,
};
use crate::{Error, Result, C64};

/// Required ‖S·vec(ρ)‖₂ of a returned steady state.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;
/// Relative pivot size below which the constrained system counts as singular.
pub const RANK_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub residual: f64,
    /// False when the stationary manifold is degenerate; `rho` is then the
    /// minimal-norm solution on the active support.
    pub unique: bool,
    /// Basis states touched by no Hamiltonian or collapse term. They are
    /// invariant on their own and carry zero weight in `rho`.
    pub frozen_states: usize,
    /// Whether eigenvalues below the positivity tolerance were clipped.
    pub clipped: bool,
}

pub fn steady_state(spec: &ModelSpec) -> Result<SteadyState> {
    steady_state_of(&hamiltonian(spec)?, &collapse_ops(spec)?)
}

pub fn steady_state_of(h: &Operator, collapse: &[Operator]) -> Result<SteadyState> {
    let d = h.dim();
    if d > DENSE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: DENSE_MAX_DIM,
        });
    }
    let s = liouvillian_matrix(h, collapse)?.to_dense();

    let mut touched = vec![false; d];
    for op in std::iter::once(h).chain(collapse) {
        for (r, c, _) in op.triplets() {
            touched[r] = true;
            touched[c] = true;
        }
    }
    let active: Vec<usize> = (0..d).filter(|&i| touched[i]).collect();
    let m = active.len();
    if m == 0 {
        return Err(Error::Solver("no basis state is coupled".into()));
    }
    let full_index: Vec<usize> = (0..m * m)
        .map(|p| active[p % m] + active[p / m] * d)
        .collect();

    // trace constraint replaces the first diagonal equation (the diagonal
    // rows sum to zero, so one of them is redundant)
    let mut a = Mat::from_fn(m * m, m * m, |p, q| s[(full_index[p], full_index[q])]);
    for q in 0..m * m {
        a[(0, q)] = C64::new(0.0, 0.0);
    }
    for i in 0..m {
        a[(0, i + i * m)] = C64::new(1.0, 0.0);
    }
    let mut b = Mat::<C64>::zeros(m * m, 1);
    b[(0, 0)] = C64::new(1.0, 0.0);

    let lu = a.partial_piv_lu();
    let u = lu.U();
    let pivots: Vec<f64> = (0..m * m).map(|i| u[(i, i)].norm()).collect();
    let largest = pivots.iter().cloned().fold(0.0, f64::max);
    let smallest = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    let unique = smallest > RANK_TOL * largest;
    let x = if unique {
        lu.solve(&b)
    } else {
        minimal_norm_solution(&a, &b)?
    };

    let mut rho = Mat::<C64>::zeros(d, d);
    for p in 0..m * m {
        rho[(active[p % m], active[p / m])] = x[(p, 0)];
    }
    let mut rho = Mat::from_fn(d, d, |i, j| 0.5 * (rho[(i, j)] + rho[(j, i)].conj()));
    let clipped = clip_negative(&mut rho)?;
    let trace: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
    rho = Mat::from_fn(d, d, |i, j| rho[(i, j)] / trace);

    let op = Operator::from_dense(h.dims().to_vec(), rho)?;
    let residual = liouvillian_residual(&s, &op);
    if !(residual < STEADY_RESIDUAL_TOL) {
        return Err(Error::Solver(format!(
            "steady-state residual {residual:e} exceeds {STEADY_RESIDUAL_TOL:e}"
        )));
    }
    Ok(SteadyState {
        rho: DensityMatrix::new(op)?,
        residual,
        unique: unique && m == d,
        frozen_states: d - m,
        clipped,
    })
}

fn liouvillian_residual(s: &Mat<C64>, rho: &Operator) -> f64 {
    let v = crate::opalg::vectorize(rho);
    (0..s.nrows())
        .map(|r| {
            let z: C64 = (0..s.ncols()).map(|c| s[(r, c)] * v[c]).sum();
            z.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

fn minimal_norm_solution(a: &Mat<C64>, b: &Mat<C64>) -> Result<Mat<C64>> {
    let svd = a
        .svd()
        .map_err(|e| Error::Solver(format!("SVD failed: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sv = svd.S().column_vector();
    let n = a.ncols();
    let cutoff = RANK_TOL * sv[0].re;
    let mut x = Mat::<C64>::zeros(n, 1);
    for k in 0..sv.nrows() {
        let sigma = sv[k].re;
        if sigma <= cutoff {
            break;
        }
        let coef: C64 = (0..b.nrows()).map(|r| u[(r, k)].conj() * b[(r, 0)]).sum::<C64>() / sigma;
        for r in 0..n {
            x[(r, 0)] += v[(r, k)] * coef;
        }
    }
    Ok(x)
}

/// Zeroes eigenvalues below the positivity tolerance. Returns whether any
/// were clipped.
fn clip_negative(rho: &mut Mat<C64>) -> Result<bool> {
    let evd = rho
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let vals = evd.S().column_vector();
    if vals[0].re >= STATE_POSITIVITY_TOL {
        return Ok(false);
    }
    let q = evd.U();
    let n = rho.nrows();
    *rho = Mat::from_fn(n, n, |i, j| {
        (0..n)
            .filter(|&k| vals[k].re > 0.0)
            .map(|k| q[(i, k)] * q[(j, k)].conj() * vals[k].re)
            .sum()
    });
    Ok(true)
}
