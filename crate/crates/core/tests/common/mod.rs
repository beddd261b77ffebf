//! Checks shared by the property tests and the acceptance suite. Each returns
//! the measured error so callers can print it next to the tolerance.

#![allow(dead_code)]

use faer::Mat;
use rydsteady::dynamics::{
    evolve_generator, lindblad_rhs, steady_state_of, EvolveOptions, LindbladGenerator,
    MasterEquation, Observable, OdeSystem, Rk4, StepStats, StepperConfig, SymmetricGenerator,
};
use rydsteady::metrics::negativity;
use rydsteady::model::{
    collapse_ops, hamiltonian, CollapseVariant, Flavor, ModelConfig, ModelSpec,
};
use rydsteady::opalg::{liouvillian_matrix, DensityMatrix, Operator};
use rydsteady::{Result, C64};

pub const FLAVORS: [Flavor; 2] = [Flavor::Full, Flavor::Effective];
pub const VARIANTS: [CollapseVariant; 3] = [
    CollapseVariant::Independent,
    CollapseVariant::CoherentSum,
    CollapseVariant::PaperEffective,
];

/// Two-atom model at the given point; ω and 𝒰 follow Δ.
pub fn two_atom(delta_mhz: f64, gamma_khz: f64, flavor: Flavor, variant: CollapseVariant) -> ModelSpec {
    let mut cfg = ModelConfig::two_atom(delta_mhz, gamma_khz);
    cfg.flavor = flavor;
    cfg.collapse_variant = Some(variant);
    cfg.resolve().expect("valid model")
}

/// ρ = AA†/tr(AA†) with A read from `entries` as (re, im) pairs.
pub fn state_from(dims: Vec<usize>, entries: &[f64]) -> DensityMatrix {
    let d: usize = dims.iter().product();
    assert!(entries.len() >= 2 * d * d);
    let a = Mat::from_fn(d, d, |i, j| {
        let k = 2 * (i * d + j);
        C64::new(entries[k], entries[k + 1])
    });
    let mut rho = &a * a.adjoint();
    let tr: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
    rho *= faer::Scale(C64::new(1.0 / tr, 0.0));
    DensityMatrix::new(Operator::from_dense(dims, rho).unwrap()).unwrap()
}

/// Normalized ket from (re, im) pairs.
pub fn ket_from(entries: &[f64]) -> Vec<C64> {
    let v: Vec<C64> = entries
        .chunks_exact(2)
        .map(|p| C64::new(p[0], p[1]))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// |tr 𝓛(ρ)|.
pub fn generator_trace(spec: &ModelSpec, rho: &DensityMatrix) -> Result<f64> {
    let out = lindblad_rhs(&hamiltonian(spec)?, &collapse_ops(spec)?, rho)?;
    Ok(out.trace().norm())
}

/// max |𝓛(ρ) - 𝓛(ρ)†|.
pub fn generator_hermiticity(spec: &ModelSpec, rho: &DensityMatrix) -> Result<f64> {
    let out = lindblad_rhs(&hamiltonian(spec)?, &collapse_ops(spec)?, rho)?;
    Ok(out.hermiticity_deviation())
}

/// max |S·vec(ρ) - 𝓛(ρ)| between the superoperator and the matrix-free
/// right-hand side.
pub fn superop_vs_matrix_free(spec: &ModelSpec, rho: &DensityMatrix) -> Result<f64> {
    let (h, ls) = (hamiltonian(spec)?, collapse_ops(spec)?);
    let via_matrix = liouvillian_matrix(&h, &ls)?.apply_operator(rho.operator())?;
    let matrix_free = LindbladGenerator::new(&h, &ls)?.apply(rho.operator())?;
    via_matrix.max_abs_diff(&matrix_free)
}

/// max |𝓛(ρ)| difference between the exchange-reduced and the full
/// generator, for an exchange-symmetrized ρ.
pub fn symmetric_vs_full(spec: &ModelSpec, rho: &DensityMatrix) -> Result<f64> {
    let (h, ls) = (hamiltonian(spec)?, collapse_ops(spec)?);
    let sym = SymmetricGenerator::new(&h, &ls)?.expect("reference models are symmetric");
    let full = LindbladGenerator::new(&h, &ls)?;
    let d = rho.dim();
    let local = rho.dims()[0];
    let swap = |i: usize| (i % local) * local + i / local;
    let m = rho.matrix();
    let sym_rho = Mat::from_fn(d, d, |i, j| (m[(i, j)] + m[(swap(i), swap(j))]) * 0.5);
    let y = sym.pack_state(&sym_rho);
    let mut dy = vec![0.0; y.len()];
    sym.rhs(&y, &mut dy);
    let a = sym.unpack_state(&dy);
    let yf = full.pack_state(&sym_rho);
    let mut dyf = vec![0.0; yf.len()];
    full.rhs(&yf, &mut dyf);
    let b = full.unpack_state(&dyf);
    let mut err: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            err = err.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    Ok(err)
}

/// Negativity of ρ_A ⊗ ρ_B.
pub fn product_negativity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    negativity(&a.tensor(b), 0)
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Driven, damped two-level atom in the basis (g, e):
/// H = -δ|e⟩⟨e| + (Ω/2)(|g⟩⟨e| + |e⟩⟨g|), L = √Γ|g⟩⟨e|.
pub fn two_level(delta: f64, omega: f64, gamma: f64) -> (Operator, Vec<Operator>) {
    let h = Operator::from_triplets(
        vec![2],
        &[(1, 1, c(-delta)), (0, 1, c(omega / 2.0)), (1, 0, c(omega / 2.0))],
    )
    .unwrap();
    let l = Operator::from_triplets(vec![2], &[(0, 1, c(gamma.sqrt()))]).unwrap();
    (h, vec![l])
}

/// Largest deviation of the direct steady state from the optical Bloch
/// closed form ρ_ee = (Ω²/4)/D, ρ_eg = (Ω/2)(δ - iΓ/2)/D with
/// D = δ² + Γ²/4 + Ω²/2.
pub fn bloch_steady_error(delta: f64, omega: f64, gamma: f64) -> Result<f64> {
    let (h, ls) = two_level(delta, omega, gamma);
    let ss = steady_state_of(&h, &ls)?;
    let den = delta * delta + gamma * gamma / 4.0 + omega * omega / 2.0;
    let ee = omega * omega / 4.0 / den;
    let eg = C64::new(delta, -gamma / 2.0) * (omega / 2.0 / den);
    let rho = &ss.rho;
    Ok([
        (rho.get(1, 1) - c(ee)).norm(),
        (rho.get(0, 0) - c(1.0 - ee)).norm(),
        (rho.get(1, 0) - eg).norm(),
        (rho.get(0, 1) - eg.conj()).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// max_t |P_e(t) - sin²(Ωt)| for H = Ω(|g⟩⟨e| + |e⟩⟨g|) from |g⟩, sampled
/// every `every` up to `t_final`.
pub fn rabi_error(omega: f64, t_final: f64, every: f64) -> Result<f64> {
    let h = Operator::from_triplets(vec![2], &[(0, 1, c(omega)), (1, 0, c(omega))])?;
    let generator = LindbladGenerator::new(&h, &[])?;
    let rho0 = DensityMatrix::from_pure(vec![2], &[c(1.0), c(0.0)])?;
    let opts = EvolveOptions::new(
        t_final,
        every,
        StepperConfig::adaptive().with_tolerances(1e-10, 1e-12),
    )
    .observe(Observable::Population {
        name: "excited".into(),
        indices: vec![1],
    });
    let rec = evolve_generator(&generator, &rho0, &opts)?;
    let pe = rec.get("excited").expect("observed");
    Ok(rec
        .times
        .iter()
        .zip(pe)
        .map(|(&t, &p)| (p - (omega * t).sin().powi(2)).abs())
        .fold(0.0, f64::max))
}

fn rk4_final(generator: &LindbladGenerator, y0: &[f64], t: f64, dt: f64) -> Vec<f64> {
    let mut y = y0.to_vec();
    let mut rk4 = Rk4::new(y.len());
    rk4.advance(generator, &mut y, 0.0, t, dt, &mut StepStats::default(), u64::MAX)
        .unwrap();
    y
}

/// ‖y_h - y_ref‖ / ‖y_{h/2} - y_ref‖ for the damped two-level atom, with
/// y_ref from a tightly toleranced adaptive run; 16 for a fourth-order
/// method.
pub fn rk4_convergence_ratio() -> f64 {
    let (h, ls) = two_level(0.4, 1.1, 0.3);
    let g = LindbladGenerator::new(&h, &ls).unwrap();
    let rho0 = DensityMatrix::from_pure(vec![2], &[c(1.0), c(0.0)]).unwrap();
    let y0 = g.pack_state(&rho0.matrix());
    let t = 5.0;
    let dt = 0.1;
    let mut opts = EvolveOptions::new(
        t,
        t,
        StepperConfig::adaptive().with_tolerances(1e-13, 1e-15),
    );
    opts.track_min_eigenvalue = false;
    let reference = evolve_generator(&g, &rho0, &opts).unwrap().final_state;
    let y_ref = g.pack_state(&reference.matrix());
    let dist = |x: &[f64]| {
        x.iter()
            .zip(&y_ref)
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    dist(&rk4_final(&g, &y0, t, dt)) / dist(&rk4_final(&g, &y0, t, dt / 2.0))
}
