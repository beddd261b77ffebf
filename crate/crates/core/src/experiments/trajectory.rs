//! Time-resolved runs and their population table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{evolve, EvolveOptions, Observable, StepStats, StepperConfig};
use crate::model::{BasisSpec, ModelConfig, TargetState};
use crate::opalg::DensityMatrix;
use crate::{Error, Result, C64};

/// Starting state of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Equal-weight mixture of every all-ground product state.
    GroundMixture,
    Pure(TargetState),
}

impl InitialState {
    pub fn density_matrix(&self, atoms: usize) -> Result<DensityMatrix> {
        let basis = BasisSpec::new(atoms);
        match self {
            InitialState::GroundMixture => {
                let comps: Vec<(f64, Vec<C64>)> = basis
                    .ground_indices()
                    .into_iter()
                    .map(|i| {
                        let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
                        v[i] = C64::new(1.0, 0.0);
                        (1.0, v)
                    })
                    .collect();
                DensityMatrix::mixture(basis.dims(), &comps)
            }
            InitialState::Pure(t) => DensityMatrix::from_pure(basis.dims(), &t.vector(atoms)?),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::GroundMixture => f.write_str("ground-mixture"),
            InitialState::Pure(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground-mixture" => Ok(InitialState::GroundMixture),
            _ => Ok(InitialState::Pure(s.parse()?)),
        }
    }
}

fn via_string<S: Serializer>(v: &impl fmt::Display, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn from_string<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr<Err = Error>,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl Serialize for InitialState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        via_string(self, s)
    }
}

impl<'de> Deserialize<'de> for InitialState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_string(d)
    }
}

mod target_serde {
    use super::*;

    pub fn serialize<S: Serializer>(t: &Option<TargetState>, s: S) -> Result<S::Ok, S::Error> {
        match t {
            Some(t) => via_string(t, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<TargetState>, D::Error> {
        Ok(Some(from_string(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    pub model: ModelConfig,
    pub initial: InitialState,
    /// Defaults to Ψ for two atoms and the singlet for three.
    #[serde(
        default,
        with = "target_serde",
        skip_serializing_if = "Option::is_none"
    )]
    pub target: Option<TargetState>,
    pub t_final_ms: f64,
    pub observe_every_ms: f64,
    pub stepper: StepperConfig,
}

impl TrajectorySpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        crate::model::parse_config(text)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&crate::model::read_config(path)?)
    }

    pub fn target_state(&self) -> TargetState {
        self.target.clone().unwrap_or(match self.model.atoms {
            3 => TargetState::S3,
            _ => TargetState::Psi,
        })
    }

    /// Copy with every optional model field and the target filled in.
    pub fn explicit(&self) -> TrajectorySpec {
        TrajectorySpec {
            model: self.model.explicit(),
            target: Some(self.target_state()),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.t_final_ms) {
            return Err(Error::config("t_final_ms", "must be positive"));
        }
        if !ok(self.observe_every_ms) {
            return Err(Error::config("observe_every_ms", "must be positive"));
        }
        self.stepper.validate()?;
        let spec = self.model.resolve()?;
        self.target_state().vector(spec.atoms)?;
        self.initial.density_matrix(spec.atoms)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t_ms: f64,
    /// The two-atom populations are NaN for three atoms.
    pub p_psi: f64,
    pub p_phi: f64,
    pub p_upsilon: f64,
    pub p_ground: f64,
    pub fidelity_target: f64,
    /// Trace before renormalization.
    pub trace: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryTable {
    pub spec: TrajectorySpec,
    pub rows: Vec<TrajectoryRow>,
    /// Smallest eigenvalue of ρ at each row.
    pub min_eigenvalues: Vec<f64>,
    pub stats: StepStats,
    pub final_state: DensityMatrix,
}

impl TrajectoryTable {
    pub const COLUMNS: [&'static str; 7] = [
        "t_ms",
        "p_psi",
        "p_phi",
        "p_upsilon",
        "p_ground",
        "fidelity_target",
        "trace",
    ];

    pub fn fidelity(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.fidelity_target).collect()
    }
}

pub fn run_trajectory(spec: &TrajectorySpec) -> Result<TrajectoryTable> {
    spec.validate()?;
    let spec = spec.explicit();
    let model = spec.model.resolve()?;
    let atoms = model.atoms;
    let rho0 = spec.initial.density_matrix(atoms)?;

    let mut opts = EvolveOptions::new(
        spec.t_final_ms * 1e3,
        spec.observe_every_ms * 1e3,
        spec.stepper,
    );
    if atoms == 2 {
        for t in [TargetState::Psi, TargetState::Phi, TargetState::Upsilon] {
            opts = opts.observe(Observable::target(&t, 2)?);
        }
    }
    opts = opts
        .observe(Observable::Population {
            name: "ground".into(),
            indices: BasisSpec::new(atoms).ground_indices(),
        })
        .observe(Observable::overlap(
            "target",
            spec.target_state().vector(atoms)?,
        ));
    let rec = evolve(&model, &rho0, &opts)?;

    let col = |name: &str| rec.get(name).map(<[f64]>::to_vec);
    let nan = vec![f64::NAN; rec.times.len()];
    let psi = col("psi").unwrap_or_else(|| nan.clone());
    let phi = col("phi").unwrap_or_else(|| nan.clone());
    let ups = col("upsilon").unwrap_or_else(|| nan.clone());
    let ground = col("ground").expect("observed");
    let target = col("target").expect("observed");
    let trace = col("trace").expect("recorded");
    let rows = (0..rec.times.len())
        .map(|k| TrajectoryRow {
            t_ms: rec.times[k] * 1e-3,
            p_psi: psi[k],
            p_phi: phi[k],
            p_upsilon: ups[k],
            p_ground: ground[k],
            fidelity_target: target[k],
            trace: trace[k],
        })
        .collect();
    Ok(TrajectoryTable {
        min_eigenvalues: col("min_eigenvalue").unwrap_or_default(),
        spec,
        rows,
        stats: rec.stats,
        final_state: rec.final_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CollapseVariant, Flavor};

    fn short_spec() -> TrajectorySpec {
        let mut model = ModelConfig::two_atom(0.5, 1.0);
        model.flavor = Flavor::Effective;
        model.collapse_variant = Some(CollapseVariant::Independent);
        TrajectorySpec {
            model,
            initial: InitialState::GroundMixture,
            target: None,
            t_final_ms: 0.5,
            observe_every_ms: 0.25,
            stepper: StepperConfig::adaptive(),
        }
    }

    #[test]
    fn ground_mixture_is_uniform() {
        let rho = InitialState::GroundMixture.density_matrix(2).unwrap();
        let b = BasisSpec::new(2);
        for i in b.ground_indices() {
            assert!((rho.get(i, i).re - 1.0 / 9.0).abs() < 1e-15);
        }
        let rho3 = InitialState::GroundMixture.density_matrix(3).unwrap();
        assert!((rho3.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn initial_state_strings() {
        assert_eq!(
            "ground-mixture".parse::<InitialState>().unwrap(),
            InitialState::GroundMixture
        );
        let s: InitialState = "gLgLgL".parse().unwrap();
        assert_eq!(s.to_string(), "gLgLgL");
        assert!("nonsense".parse::<InitialState>().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let spec = short_spec().explicit();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(TrajectorySpec::from_json_str(&text).unwrap(), spec);
        let bad = text.replace("t_final_ms", "t_end_ms");
        assert!(matches!(
            TrajectorySpec::from_json_str(&bad),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn rows_follow_the_observation_grid() {
        let table = run_trajectory(&short_spec()).unwrap();
        let t: Vec<f64> = table.rows.iter().map(|r| r.t_ms).collect();
        assert_eq!(t, vec![0.0, 0.25, 0.5]);
        let r0 = table.rows[0];
        assert!((r0.p_psi - 1.0 / 9.0).abs() < 1e-14);
        assert_eq!(r0.p_psi, r0.fidelity_target);
        assert!((r0.p_ground - 1.0).abs() < 1e-14);
        for r in &table.rows {
            assert!((r.trace - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn three_atom_rows_mark_pair_states_undefined() {
        let spec = TrajectorySpec {
            model: ModelConfig::three_atom(0.5, 1.0),
            initial: "gLgLgL".parse().unwrap(),
            target: None,
            t_final_ms: 0.002,
            observe_every_ms: 0.001,
            stepper: StepperConfig::rk4(0.05),
        };
        let table = run_trajectory(&spec).unwrap();
        assert_eq!(table.spec.target, Some(TargetState::S3));
        assert!(table.rows.iter().all(|r| r.p_psi.is_nan()));
        assert_eq!(table.rows[0].fidelity_target, 0.0);
    }

    #[test]
    fn invalid_horizon_is_a_config_error() {
        let mut spec = short_spec();
        spec.t_final_ms = 0.0;
        assert!(run_trajectory(&spec).unwrap_err().is_config_error());
    }
}
