use faer::Side;

use super::Operator;
use crate::{Error, Result};

/// Inputs to the Hermitian routines may deviate from exact Hermiticity by
/// at most this much (max entrywise |A - A^dag|).
pub const HERMITIAN_TOL: f64 = 1e-10;

fn require_hermitian(a: &Operator) -> Result<()> {
    let deviation = a.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Full real spectrum of a Hermitian operator, ascending, with multiplicity.
pub fn hermitian_eigenvalues(a: &Operator) -> Result<Vec<f64>> {
    require_hermitian(a)?;
    let mut vals = a
        .to_dense()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    vals.sort_by(|x, y| x.total_cmp(y));
    Ok(vals)
}

/// Trace norm of a Hermitian operator: the sum of absolute eigenvalues.
pub fn trace_norm_hermitian(a: &Operator) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|v| v.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn identity_spectrum() {
        let vals = hermitian_eigenvalues(&Operator::identity(vec![6]).unwrap()).unwrap();
        assert_eq!(vals.len(), 6);
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn diagonal_detuning_block() {
        let delta = 2.5;
        let a = Operator::from_triplets(vec![2], &[(0, 0, C64::new(-delta, 0.0))]).unwrap();
        let vals = hermitian_eigenvalues(&a).unwrap();
        assert!((vals[0] + delta).abs() < 1e-14);
        assert!(vals[1].abs() < 1e-14);
    }

    #[test]
    fn flip_matrix_splits_symmetrically() {
        let omega = 0.7;
        let a = Operator::from_triplets(
            vec![2],
            &[(0, 1, C64::new(omega, 0.0)), (1, 0, C64::new(omega, 0.0))],
        )
        .unwrap();
        let vals = hermitian_eigenvalues(&a).unwrap();
        assert!((vals[0] + omega).abs() < 1e-14);
        assert!((vals[1] - omega).abs() < 1e-14);
    }

    #[test]
    fn constructed_spectrum_trace_norm() {
        let a = Operator::from_triplets(
            vec![2],
            &[(0, 0, C64::new(0.5, 0.0)), (1, 1, C64::new(-0.5, 0.0))],
        )
        .unwrap();
        assert!((trace_norm_hermitian(&a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = Operator::from_triplets(vec![2], &[(0, 1, C64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&a),
            Err(Error::NotHermitian { .. })
        ));
        assert!(trace_norm_hermitian(&a).is_err());
    }
}
