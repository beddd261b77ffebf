//! Spontaneous-emission operators. Every excited level decays to each of the
//! three ground levels with rate γ/3.

use super::basis::{BasisSpec, Branch, Level, LEVELS_PER_ATOM};
use super::spec::{CollapseVariant, ModelSpec};
use crate::opalg::{embed, Operator};
use crate::{Error, Result, C64};

fn amplitude(spec: &ModelSpec) -> C64 {
    C64::new((spec.gamma / 3.0).sqrt(), 0.0)
}

fn local(trip: &[(usize, usize, C64)]) -> Operator {
    Operator::from_triplets(vec![LEVELS_PER_ATOM], trip).expect("6x6 triplets")
}

pub fn collapse_ops(spec: &ModelSpec) -> Result<Vec<Operator>> {
    spec.validate()?;
    match spec.collapse_variant {
        CollapseVariant::Independent => independent(spec),
        CollapseVariant::CoherentSum => coherent_sum(spec),
        CollapseVariant::PaperEffective => paper_effective(spec),
    }
}

/// √(γ/3)|g_j><e_i| on each atom; ordered by atom, then j, then i.
fn independent(spec: &ModelSpec) -> Result<Vec<Operator>> {
    let a = amplitude(spec);
    let dims = spec.dims();
    let mut out = Vec::with_capacity(9 * spec.atoms);
    for site in 0..spec.atoms {
        for j in Branch::ALL {
            for i in Branch::ALL {
                let l = local(&[(Level::Ground(j).index(), Level::Excited(i).index(), a)]);
                out.push(embed(&l, site, &dims)?);
            }
        }
    }
    Ok(out)
}

/// √(γ/3) Σ_i |g_j><e_i| on each atom.
fn coherent_sum(spec: &ModelSpec) -> Result<Vec<Operator>> {
    let a = amplitude(spec);
    let dims = spec.dims();
    let mut out = Vec::with_capacity(3 * spec.atoms);
    for site in 0..spec.atoms {
        for j in Branch::ALL {
            let trip: Vec<_> = Branch::ALL
                .iter()
                .map(|&i| (Level::Ground(j).index(), Level::Excited(i).index(), a))
                .collect();
            out.push(embed(&local(&trip), site, &dims)?);
        }
    }
    Ok(out)
}

/// The two-atom effective-subspace operators L_1^k, L_2^k (k = L, 0, R), in
/// that order. Atom `n` decays to g_k from e_i only when the partner sits in
/// a level of different branch j ≠ i; the same-state channel e_k g_k (or
/// g_k e_k) feeds |g_k g_k> directly, which is what the Ψ, Φ, Υ combinations
/// of the source reduce to.
fn paper_effective(spec: &ModelSpec) -> Result<Vec<Operator>> {
    if spec.atoms != 2 {
        return Err(Error::FlavorMismatch(
            "the paper-effective collapse set is defined for two atoms only".into(),
        ));
    }
    let a = amplitude(spec);
    let basis = BasisSpec::new(2);
    let ix = |x: Level, y: Level| basis.index(&[x, y]).expect("two levels");
    let mut out = Vec::with_capacity(6);
    for first in [true, false] {
        // `order` places the decaying atom first or second
        let order = |decaying: Level, partner: Level| {
            if first {
                ix(decaying, partner)
            } else {
                ix(partner, decaying)
            }
        };
        for k in Branch::ALL {
            let gk = Level::Ground(k);
            let mut trip = Vec::new();
            for i in Branch::ALL {
                for j in Branch::ALL.into_iter().filter(|&j| j != i) {
                    let ei = Level::Excited(i);
                    for partner in [Level::Excited(j), Level::Ground(j)] {
                        trip.push((order(gk, partner), order(ei, partner), a));
                    }
                }
            }
            trip.push((ix(gk, gk), order(Level::Excited(k), gk), a));
            out.push(Operator::from_triplets(basis.dims(), &trip)?);
        }
    }
    Ok(out)
}

/// Σ_k L_k† L_k.
pub fn decay_operator(collapse: &[Operator]) -> Result<Operator> {
    let first = collapse
        .first()
        .ok_or_else(|| Error::InvalidSpec("empty collapse set".into()))?;
    let mut total = Operator::zeros(first.dims().to_vec())?;
    for l in collapse {
        total = total.add(&l.adjoint().matmul(l)?)?;
    }
    Ok(total)
}
