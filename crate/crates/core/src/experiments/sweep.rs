//! Steady-state parameter sweeps.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::steady_state;
use crate::metrics::{fidelity_pure, negativity};
use crate::model::{ModelConfig, TargetState};
use crate::{Error, Result};

/// Configuration key a sweep axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    DeltaMhz,
    GammaKhz,
    OmegaMhz,
}

impl SweepParam {
    fn set(self, cfg: &mut ModelConfig, v: f64) {
        match self {
            SweepParam::DeltaMhz => cfg.delta_mhz = v,
            SweepParam::GammaKhz => cfg.gamma_khz = v,
            SweepParam::OmegaMhz => cfg.omega_mhz = crate::model::DriveConfig::Uniform(v),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::DeltaMhz => "delta_mhz",
            SweepParam::GammaKhz => "gamma_khz",
            SweepParam::OmegaMhz => "omega_mhz",
        })
    }
}

/// One grid axis. In JSON either `values` or all of `start`, `stop` and
/// `steps` must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl Axis {
    pub fn values(param: SweepParam, values: Vec<f64>) -> Self {
        Axis {
            param,
            values,
            start: None,
            stop: None,
            steps: None,
        }
    }

    /// `steps` evenly spaced points, both ends included.
    pub fn linspace(param: SweepParam, start: f64, stop: f64, steps: usize) -> Self {
        Axis {
            param,
            values: Vec::new(),
            start: Some(start),
            stop: Some(stop),
            steps: Some(steps),
        }
    }

    /// The grid points, with a linspace form expanded.
    pub fn points(&self) -> Result<Vec<f64>> {
        let key = || format!("axes.{}", self.param);
        let pts = match (self.start, self.stop, self.steps) {
            (None, None, None) => self.values.clone(),
            (Some(a), Some(b), Some(n)) if self.values.is_empty() => match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n)
                    .map(|k| {
                        if k == n - 1 {
                            b
                        } else {
                            a + (b - a) * k as f64 / (n - 1) as f64
                        }
                    })
                    .collect(),
            },
            _ => {
                return Err(Error::config(
                    key(),
                    "give either `values` or all of `start`, `stop`, `steps`",
                ))
            }
        };
        if pts.is_empty() {
            return Err(Error::config(key(), "grid is empty"));
        }
        if pts.iter().any(|v| !v.is_finite()) {
            return Err(Error::config(key(), "grid values must be finite"));
        }
        Ok(pts)
    }

    fn expanded(&self) -> Result<Axis> {
        Ok(Axis::values(self.param, self.points()?))
    }
}

/// Parameters recomputed from Δ and Ω at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivedRules {
    /// ω = 3Ω²/(4Δ) for both microwave fields.
    #[serde(default = "yes")]
    pub microwave: bool,
    /// Interaction table from Δ (𝒰 = 2Δ, 𝒰_ii = 2𝒰 for two atoms).
    #[serde(default = "yes")]
    pub interaction: bool,
}

fn yes() -> bool {
    true
}

impl Default for DerivedRules {
    fn default() -> Self {
        DerivedRules {
            microwave: true,
            interaction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    Negativity,
    FidelityPsi,
}

fn all_metrics() -> Vec<SweepMetric> {
    vec![SweepMetric::Negativity, SweepMetric::FidelityPsi]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ModelConfig,
    /// One or two axes; the first varies slowest.
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub derived: DerivedRules,
    #[serde(default = "all_metrics")]
    pub metrics: Vec<SweepMetric>,
}

impl SweepSpec {
    pub fn new(base: ModelConfig, axes: Vec<Axis>) -> Self {
        SweepSpec {
            base,
            axes,
            derived: DerivedRules::default(),
            metrics: all_metrics(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        crate::model::parse_config(text)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&crate::model::read_config(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::config("axes", "a sweep needs one or two axes"));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::config("axes", "both axes vary the same parameter"));
        }
        for a in &self.axes {
            a.points()?;
        }
        self.base.resolve()?;
        Ok(())
    }

    /// Copy with every axis given by explicit values.
    pub fn expanded(&self) -> Result<SweepSpec> {
        Ok(SweepSpec {
            axes: self.axes.iter().map(Axis::expanded).collect::<Result<_>>()?,
            ..self.clone()
        })
    }

    /// Fully resolved configuration of every grid point, first axis slowest.
    pub fn grid(&self) -> Result<Vec<ModelConfig>> {
        self.validate()?;
        let mut cfgs = vec![self.base.clone()];
        for axis in &self.axes {
            let pts = axis.points()?;
            cfgs = cfgs
                .iter()
                .flat_map(|c| {
                    pts.iter().map(move |&v| {
                        let mut c = c.clone();
                        axis.param.set(&mut c, v);
                        c
                    })
                })
                .collect();
        }
        Ok(cfgs
            .into_iter()
            .map(|mut c| {
                if self.derived.microwave {
                    c.omega_mw_mhz = None;
                }
                if self.derived.interaction {
                    c.u_table_mhz = None;
                }
                c.explicit()
            })
            .collect())
    }
}

/// Outcome of a single grid point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    /// The stationary manifold is degenerate; metrics refer to the
    /// minimal-norm representative.
    NonUnique,
    Error(String),
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointStatus::Ok => f.write_str("ok"),
            PointStatus::NonUnique => f.write_str("non-unique"),
            PointStatus::Error(msg) => write!(f, "error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta_mhz: f64,
    pub gamma_khz: f64,
    /// NaN when not requested or undefined.
    pub negativity: f64,
    pub fidelity_psi: f64,
    pub residual: f64,
    pub status: PointStatus,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    /// The sweep with explicit axis values.
    pub spec: SweepSpec,
    /// Resolved configuration of each row.
    pub points: Vec<ModelConfig>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub const COLUMNS: [&'static str; 7] = [
        "delta_mhz",
        "gamma_khz",
        "negativity",
        "fidelity_psi",
        "residual",
        "status",
        "wall_ms",
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 picks rayon's default.
    pub jobs: usize,
    /// When false, wall times are reported as 0 so output is reproducible.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            jobs: 1,
            timing: true,
        }
    }
}

/// Runs `f` on a pool of `jobs` threads.
pub(crate) fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    Ok(pool.install(f))
}

pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions) -> Result<SweepTable> {
    let spec = spec.expanded()?;
    let points = spec.grid()?;
    let rows = with_pool(opts.jobs, || {
        points
            .par_iter()
            .map(|cfg| steady_row(cfg, &spec.metrics, opts.timing))
            .collect()
    })?;
    Ok(SweepTable { spec, points, rows })
}

/// Steady state and metrics of one configuration. Failures end up in the
/// status column.
pub fn steady_row(cfg: &ModelConfig, metrics: &[SweepMetric], timing: bool) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow {
        delta_mhz: cfg.delta_mhz,
        gamma_khz: cfg.gamma_khz,
        negativity: f64::NAN,
        fidelity_psi: f64::NAN,
        residual: f64::NAN,
        status: PointStatus::Ok,
        wall_ms: 0.0,
    };
    let outcome = (|| -> Result<()> {
        let spec = cfg.resolve()?;
        let ss = steady_state(&spec)?;
        row.residual = ss.residual;
        if !ss.unique {
            row.status = PointStatus::NonUnique;
        }
        let two_atoms = spec.atoms == 2;
        if two_atoms && metrics.contains(&SweepMetric::Negativity) {
            row.negativity = negativity(&ss.rho, 0)?;
        }
        if two_atoms && metrics.contains(&SweepMetric::FidelityPsi) {
            row.fidelity_psi = fidelity_pure(&ss.rho, &TargetState::Psi.vector(2)?)?;
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        row.status = PointStatus::Error(e.to_string());
    }
    if timing {
        row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    row
}
