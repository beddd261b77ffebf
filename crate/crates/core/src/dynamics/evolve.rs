//! Time evolution with periodic observation.

use serde::{Deserialize, Serialize};

use faer::Mat;

use super::generator::{LindbladGenerator, MasterEquation};
use super::symmetric::SymmetricGenerator;
use super::stepper::{DormandPrince, Rk4, StepStats, StepperConfig, StepperKind, RK4_STABILITY_LIMIT};
use crate::model::{collapse_ops, hamiltonian, ModelSpec, TargetState};
use crate::opalg::{hermitian_eigenvalues, DensityMatrix, Operator};
use crate::{Error, Result, C64};

/// Trace drift between observations beyond which a run is abandoned.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Quantity recorded at every observation time.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// <ψ|ρ|ψ>
    Overlap { name: String, ket: Vec<C64> },
    /// Σ_i ρ_ii over the listed basis indices.
    Population { name: String, indices: Vec<usize> },
}

impl Observable {
    pub fn overlap(name: impl Into<String>, ket: Vec<C64>) -> Self {
        Observable::Overlap {
            name: name.into(),
            ket,
        }
    }

    pub fn target(target: &TargetState, atoms: usize) -> Result<Self> {
        Ok(Self::overlap(target.name(), target.vector(atoms)?))
    }

    pub fn name(&self) -> &str {
        match self {
            Observable::Overlap { name, .. } | Observable::Population { name, .. } => name,
        }
    }

    fn evaluate(&self, rho: &Operator) -> Result<f64> {
        match self {
            Observable::Overlap { ket, .. } => Ok(rho.expectation(ket, ket)?.re),
            Observable::Population { indices, .. } => {
                Ok(indices.iter().map(|&i| rho.get(i, i).re).sum())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub observe_every: f64,
    pub stepper: StepperConfig,
    pub observables: Vec<Observable>,
    /// Record the smallest eigenvalue of ρ at each observation.
    pub track_min_eigenvalue: bool,
    /// Propagate only the atom-exchange-invariant part of ρ when the model
    /// and the initial state allow it.
    pub use_symmetry: bool,
}

impl EvolveOptions {
    pub fn new(t_final: f64, observe_every: f64, stepper: StepperConfig) -> Self {
        EvolveOptions {
            t_final,
            observe_every,
            stepper,
            observables: Vec::new(),
            track_min_eigenvalue: true,
            use_symmetry: true,
        }
    }

    pub fn observe(mut self, obs: Observable) -> Self {
        self.observables.push(obs);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    /// Observation times (µs), strictly increasing.
    pub times: Vec<f64>,
    /// Requested observables followed by `trace` and, when tracked,
    /// `min_eigenvalue`.
    pub series: Vec<Series>,
    pub final_state: DensityMatrix,
    pub stats: StepStats,
    /// Whether the run used the exchange-symmetric reduction.
    pub symmetry_reduced: bool,
}

impl TrajectoryRecord {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.values.as_slice())
    }
}

/// Largest rk4-fixed step accepted for this generator.
pub fn rk4_step_bound<G: MasterEquation>(generator: &G) -> f64 {
    RK4_STABILITY_LIMIT / generator.spectral_bound()
}

pub fn evolve(spec: &ModelSpec, rho0: &DensityMatrix, opts: &EvolveOptions) -> Result<TrajectoryRecord> {
    let (h, collapse) = (hamiltonian(spec)?, collapse_ops(spec)?);
    if opts.use_symmetry {
        if let Some(sym) = SymmetricGenerator::new(&h, &collapse)? {
            if sym.is_invariant(&rho0.matrix()) {
                return evolve_generator(&sym, rho0, opts);
            }
        }
    }
    evolve_generator(&LindbladGenerator::new(&h, &collapse)?, rho0, opts)
}

pub fn evolve_generator<G: MasterEquation>(
    generator: &G,
    rho0: &DensityMatrix,
    opts: &EvolveOptions,
) -> Result<TrajectoryRecord> {
    opts.stepper.validate()?;
    if !(opts.t_final > 0.0) || !(opts.observe_every > 0.0) {
        return Err(Error::InvalidStepper(format!(
            "t_final and observe_every must be positive (got {}, {})",
            opts.t_final, opts.observe_every
        )));
    }
    if rho0.dims() != generator.dims() {
        return Err(Error::DimensionMismatch {
            context: "initial state",
            expected: generator.dims().iter().product(),
            found: rho0.dim(),
        });
    }
    if opts.stepper.kind == StepperKind::Rk4Fixed {
        let bound = rk4_step_bound(generator);
        if opts.stepper.dt > bound {
            return Err(Error::StepTooLarge {
                dt: opts.stepper.dt,
                bound,
            });
        }
    }

    let n_obs = (opts.t_final / opts.observe_every - 1e-9).ceil() as usize;
    let time_at = |k: usize| {
        if k == n_obs {
            opts.t_final
        } else {
            k as f64 * opts.observe_every
        }
    };

    let mut y = generator.pack_state(&rho0.matrix());
    let mut rk4 = Rk4::new(generator.len());
    let mut dopri = DormandPrince::new(generator.len(), opts.stepper.dt);
    let mut stats = StepStats::default();

    let mut times = Vec::with_capacity(n_obs + 1);
    let mut series: Vec<Series> = opts
        .observables
        .iter()
        .map(|o| Series {
            name: o.name().to_string(),
            values: Vec::with_capacity(n_obs + 1),
        })
        .collect();
    series.push(Series {
        name: "trace".into(),
        values: Vec::new(),
    });
    if opts.track_min_eigenvalue {
        series.push(Series {
            name: "min_eigenvalue".into(),
            values: Vec::new(),
        });
    }

    let mut rho = Operator::zeros(generator.dims().to_vec())?;
    for k in 0..=n_obs {
        let t = time_at(k);
        if k > 0 {
            let t_prev = time_at(k - 1);
            match opts.stepper.kind {
                StepperKind::Rk4Fixed => rk4.advance(
                    generator,
                    &mut y,
                    t_prev,
                    t,
                    opts.stepper.dt,
                    &mut stats,
                    opts.stepper.max_steps,
                )?,
                StepperKind::RkAdaptive => dopri.advance(
                    generator,
                    &mut y,
                    t_prev,
                    t,
                    opts.stepper.rel_tol,
                    opts.stepper.abs_tol,
                    &mut stats,
                    opts.stepper.max_steps,
                )?,
            }
        }
        let (m, trace) = normalize(generator.unpack_state(&y), t)?;
        y = generator.pack_state(&m);
        dopri.invalidate();
        rho = Operator::from_dense(generator.dims().to_vec(), m)?;
        times.push(t);
        for (s, o) in series.iter_mut().zip(&opts.observables) {
            s.values.push(o.evaluate(&rho)?);
        }
        let n = opts.observables.len();
        series[n].values.push(trace);
        if opts.track_min_eigenvalue {
            series[n + 1].values.push(hermitian_eigenvalues(&rho)?[0]);
        }
    }
    Ok(TrajectoryRecord {
        times,
        series,
        final_state: DensityMatrix::new(rho)?,
        stats,
        symmetry_reduced: generator.symmetry_reduced(),
    })
}

/// Re-symmetrizes ρ ← (ρ + ρ†)/2 and rescales to unit trace. Also returns
/// the trace before rescaling.
fn normalize(m: Mat<C64>, t: f64) -> Result<(Mat<C64>, f64)> {
    let d = m.nrows();
    let herm = Mat::from_fn(d, d, |a, b| 0.5 * (m[(a, b)] + m[(b, a)].conj()));
    let trace: f64 = (0..d).map(|a| herm[(a, a)].re).sum();
    if !trace.is_finite() || (trace - 1.0).abs() > TRACE_DRIFT_LIMIT {
        return Err(Error::TraceDrift {
            drift: (trace - 1.0).abs(),
            t,
        });
    }
    Ok((Mat::from_fn(d, d, |a, b| herm[(a, b)] / trace), trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn two_level(omega: f64) -> LindbladGenerator {
        let h = Operator::from_triplets(vec![2], &[(0, 1, c(omega)), (1, 0, c(omega))]).unwrap();
        LindbladGenerator::new(&h, &[]).unwrap()
    }

    #[test]
    fn rabi_oscillation() {
        let omega = 0.8;
        let gen = two_level(omega);
        let rho0 = DensityMatrix::from_pure(vec![2], &[c(1.0), c(0.0)]).unwrap();
        let opts = EvolveOptions::new(10.0, 0.5, StepperConfig::rk4(0.005)).observe(
            Observable::Population {
                name: "pe".into(),
                indices: vec![1],
            },
        );
        let rec = evolve_generator(&gen, &rho0, &opts).unwrap();
        assert_eq!(rec.times.len(), 21);
        for (t, p) in rec.times.iter().zip(rec.get("pe").unwrap()) {
            assert!((p - (omega * t).sin().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn rk4_guard() {
        let gen = two_level(1.0);
        let rho0 = DensityMatrix::from_pure(vec![2], &[c(1.0), c(0.0)]).unwrap();
        let opts = EvolveOptions::new(1.0, 0.5, StepperConfig::rk4(2.0));
        assert!(matches!(
            evolve_generator(&gen, &rho0, &opts),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn observation_grid_includes_endpoint() {
        let gen = two_level(0.3);
        let rho0 = DensityMatrix::from_pure(vec![2], &[c(1.0), c(0.0)]).unwrap();
        let opts = EvolveOptions::new(1.25, 0.5, StepperConfig::adaptive());
        let rec = evolve_generator(&gen, &rho0, &opts).unwrap();
        assert_eq!(rec.times, vec![0.0, 0.5, 1.0, 1.25]);
        assert!(rec.get("trace").unwrap().iter().all(|t| (t - 1.0).abs() < 1e-12));
    }
}
