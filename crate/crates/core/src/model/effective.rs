//! Second-order effective Hamiltonian of the two-atom model, embedded in the
//! full 36-dimensional space.
//!
//! H' = H_Ω + H_ω. H_Ω couples each cross ground pair |g_ig_j> (i≠j)
//! resonantly to |e_ie_j> and Stark-shifts both, with every element equal to
//! 2Ω²/Δ; the same-state ground pairs get the same shift through the
//! projectors on Ψ, Φ and Υ. H_ω is the microwave drive restricted to the
//! ground⊗ground manifold.

use super::basis::{BasisSpec, Branch, Level};
use super::hamiltonian::microwave_hamiltonian;
use super::spec::ModelSpec;
use super::targets::{target_state, TargetState};
use crate::opalg::Operator;
use crate::{Error, Result, C64};

/// The single real Rabi frequency the effective model is derived for.
pub fn effective_rabi(spec: &ModelSpec) -> Result<f64> {
    let [a, b, c] = spec.omega_drive;
    if a != b || b != c || a.im != 0.0 {
        return Err(Error::FlavorMismatch(
            "the effective flavor needs equal real drives Ω_L = Ω_0 = Ω_R".into(),
        ));
    }
    if spec.delta == 0.0 {
        return Err(Error::FlavorMismatch(
            "the effective flavor needs a nonzero detuning".into(),
        ));
    }
    Ok(a.re)
}

/// 2Ω²/Δ
pub fn effective_coupling(spec: &ModelSpec) -> Result<f64> {
    let omega = effective_rabi(spec)?;
    Ok(2.0 * omega * omega / spec.delta)
}

pub fn effective_drive_hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    if spec.atoms != 2 {
        return Err(Error::FlavorMismatch(
            "the effective flavor is derived for two atoms only".into(),
        ));
    }
    let c = C64::new(effective_coupling(spec)?, 0.0);
    let basis = BasisSpec::new(2);
    let mut trip = Vec::new();
    for i in Branch::ALL {
        for j in Branch::ALL {
            if i == j {
                continue;
            }
            let g = basis.index(&[Level::Ground(i), Level::Ground(j)])?;
            let e = basis.index(&[Level::Excited(i), Level::Excited(j)])?;
            trip.extend([(g, e, c), (e, g, c), (e, e, c), (g, g, c)]);
        }
    }
    for t in [TargetState::Psi, TargetState::Phi, TargetState::Upsilon] {
        let v = target_state(&t, 2)?;
        for (a, va) in v.iter().enumerate().filter(|(_, x)| x.norm() > 0.0) {
            for (b, vb) in v.iter().enumerate().filter(|(_, x)| x.norm() > 0.0) {
                trip.push((a, b, c * va * vb.conj()));
            }
        }
    }
    Operator::from_triplets(basis.dims(), &trip)
}

/// Microwave Hamiltonian projected onto the ground⊗ground manifold. For
/// ω_L0 = ω_0R = ω real this is the explicit form written in terms of Φ and
/// Υ (see the tests).
pub fn effective_microwave_hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    let full = microwave_hamiltonian(spec)?;
    let basis = spec.basis();
    let ground: Vec<bool> = (0..basis.dim())
        .map(|i| basis.excitation_count(i) == 0)
        .collect();
    let trip: Vec<_> = full
        .triplets()
        .into_iter()
        .filter(|&(r, c, _)| ground[r] && ground[c])
        .collect();
    Operator::from_triplets(basis.dims(), &trip)
}

pub fn effective_hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    effective_drive_hamiltonian(spec)?.add(&effective_microwave_hamiltonian(spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::basis::parse_levels;
    use crate::model::spec::Flavor;

    fn spec() -> ModelSpec {
        ModelSpec::two_atom(0.5, 1.0).with_flavor(Flavor::Effective)
    }

    fn ket(label: &str) -> Vec<C64> {
        BasisSpec::new(2).ket(&parse_levels(label).unwrap()).unwrap()
    }

    fn add(a: &[C64], b: &[C64], s: f64) -> Vec<C64> {
        a.iter().zip(b).map(|(x, y)| x + y * s).collect()
    }

    fn norm(v: &[C64]) -> f64 {
        v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn coupling_element() {
        let s = spec();
        let h = effective_hamiltonian(&s).unwrap();
        let b = BasisSpec::new(2);
        let g = b.index(&parse_levels("gLg0").unwrap()).unwrap();
        let e = b.index(&parse_levels("eLe0").unwrap()).unwrap();
        let omega = s.omega_drive[0].re;
        let want = 2.0 * omega * omega / s.delta;
        assert!((h.get(g, e).re - want).abs() < 1e-15);
        assert!((h.get(e, e).re - want).abs() < 1e-15);
    }

    #[test]
    fn psi_is_eigenvector() {
        let s = spec();
        let h = effective_hamiltonian(&s).unwrap();
        let psi = target_state(&TargetState::Psi, 2).unwrap();
        let hpsi = h.apply(&psi).unwrap();
        let c = effective_coupling(&s).unwrap();
        let diff: Vec<C64> = hpsi.iter().zip(&psi).map(|(a, b)| a - b * c).collect();
        assert!(norm(&diff) < 1e-15);
        let hw = effective_microwave_hamiltonian(&s).unwrap();
        assert!(norm(&hw.apply(&psi).unwrap()) < 1e-12);
    }

    #[test]
    fn drive_part_diagonal_on_same_state_triplet() {
        let mut s = spec();
        s.microwave = [C64::new(0.0, 0.0); 2];
        let h = effective_hamiltonian(&s).unwrap();
        let phi = target_state(&TargetState::Phi, 2).unwrap();
        let ups = target_state(&TargetState::Upsilon, 2).unwrap();
        assert!(h.expectation(&phi, &ups).unwrap().norm() < 1e-15);
    }

    #[test]
    fn decoupled_states_have_empty_rows() {
        let h = effective_hamiltonian(&spec()).unwrap();
        let b = BasisSpec::new(2);
        for idx in 0..36 {
            let n = b.excitation_count(idx);
            let lv = b.levels(idx);
            let same_bi = n == 2 && lv[0] == lv[1];
            if n == 1 || same_bi {
                for k in 0..36 {
                    assert_eq!(h.get(idx, k), C64::new(0.0, 0.0));
                    assert_eq!(h.get(k, idx), C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn microwave_projection_matches_explicit_form() {
        let s = spec();
        let w = s.microwave[0].re;
        let phi = target_state(&TargetState::Phi, 2).unwrap();
        let ups = target_state(&TargetState::Upsilon, 2).unwrap();
        let r3 = 3f64.sqrt();
        let l0 = add(&ket("gLg0"), &ket("g0gL"), 1.0);
        let r0 = add(&ket("gRg0"), &ket("g0gR"), 1.0);
        let phi_p_ups = add(&phi, &ups, 1.0 / r3);
        let phi_m_ups = add(&phi, &ups, -1.0 / r3);
        let half = |k: &[C64], b: &[C64], s: f64| {
            Operator::outer(vec![6, 6], k, b).unwrap().scale(C64::new(s, 0.0))
        };
        // ω/√2 (|gLg0>+|g0gL>)(√3<Φ|+<Υ|) = ω√(3/2) (..)(<Φ|+<Υ|/√3)
        let coef = w * r3 / 2f64.sqrt();
        let mut upper = half(&l0, &phi_p_ups, coef)
            .add(&half(&r0, &phi_m_ups, coef))
            .unwrap();
        let a = add(&ket("g0gL"), &ket("gRg0"), 1.0);
        let b = add(&ket("gLg0"), &ket("g0gR"), 1.0);
        upper = upper
            .add(&half(&a, &ket("gRgL"), w))
            .unwrap()
            .add(&half(&b, &ket("gLgR"), w))
            .unwrap();
        let explicit = upper.add(&upper.adjoint()).unwrap();
        let built = effective_microwave_hamiltonian(&s).unwrap();
        assert!(built.max_abs_diff(&explicit).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_unequal_drives() {
        let mut s = spec();
        s.omega_drive[1] = C64::new(0.0, 0.0);
        assert!(matches!(
            effective_hamiltonian(&s),
            Err(Error::FlavorMismatch(_))
        ));
    }
}
