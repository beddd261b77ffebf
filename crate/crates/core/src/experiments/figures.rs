//! Preset jobs regenerating each figure's data.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::output::{write_outputs, Job, OutputFormat, OutputTarget, RunResult, Written};
use super::sweep::{Axis, RunOptions, SweepParam, SweepSpec};
use super::trajectory::{InitialState, TrajectorySpec};
use crate::dynamics::StepperConfig;
use crate::model::{CollapseVariant, Flavor, ModelConfig, ModelOverrides};
use crate::{Error, Result};

/// Detuning grid of the negativity map and the fidelity scan, MHz.
pub const DELTA_GRID_MHZ: (f64, f64, usize) = (0.5, 5.0, 10);
/// Decay-rate grid of the negativity map, kHz.
pub const GAMMA_GRID_KHZ: (f64, f64, usize) = (1.0, 10.0, 10);
pub const FIG3_INSET_HORIZON_MS: f64 = 100.0;
pub const FIG4_HORIZON_MS: f64 = 300.0;
/// RK4 step of the three-atom run, µs.
pub const FIG4_DT_US: f64 = 0.1;
pub const TRAJECTORY_OBSERVE_MS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig3Inset,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig2, Figure::Fig3, Figure::Fig3Inset, Figure::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig3Inset => "fig3-inset",
            Figure::Fig4 => "fig4",
        }
    }

    fn notes(self) -> Vec<String> {
        let grid = "grid resolution is a default choice; only the endpoints are fixed";
        match self {
            Figure::Fig2 | Figure::Fig3 => vec![grid.into()],
            Figure::Fig3Inset => vec![
                "default model: effective flavor with independent decay channels".into(),
            ],
            Figure::Fig4 => vec![format!("rk4-fixed with dt = {FIG4_DT_US} us")],
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOptions {
    pub overrides: ModelOverrides,
    /// Trajectory length; ignored by the sweep figures.
    pub horizon_ms: Option<f64>,
}

/// The job behind a figure. Overrides of a swept parameter are superseded by
/// the grid.
pub fn figure_job(fig: Figure, opts: &FigureOptions) -> Result<Job> {
    let delta_axis = || {
        let (a, b, n) = DELTA_GRID_MHZ;
        Axis::linspace(SweepParam::DeltaMhz, a, b, n)
    };
    let apply = |base: ModelConfig| opts.overrides.apply(&base);
    let job = match fig {
        Figure::Fig2 => {
            let (a, b, n) = GAMMA_GRID_KHZ;
            Job::Sweep(SweepSpec::new(
                apply(ModelConfig::two_atom(DELTA_GRID_MHZ.0, a)),
                vec![delta_axis(), Axis::linspace(SweepParam::GammaKhz, a, b, n)],
            ))
        }
        Figure::Fig3 => Job::Sweep(SweepSpec::new(
            apply(ModelConfig::two_atom(DELTA_GRID_MHZ.0, 1.0)),
            vec![delta_axis()],
        )),
        Figure::Fig3Inset => {
            let mut base = ModelConfig::two_atom(0.5, 1.0);
            base.flavor = Flavor::Effective;
            base.collapse_variant = Some(CollapseVariant::Independent);
            Job::Trajectory(TrajectorySpec {
                model: apply(base),
                initial: InitialState::GroundMixture,
                target: None,
                t_final_ms: opts.horizon_ms.unwrap_or(FIG3_INSET_HORIZON_MS),
                observe_every_ms: TRAJECTORY_OBSERVE_MS,
                stepper: StepperConfig::adaptive(),
            })
        }
        Figure::Fig4 => Job::Trajectory(TrajectorySpec {
            model: apply(ModelConfig::three_atom(0.5, 1.0)),
            initial: "gLgLgL".parse()?,
            target: None,
            t_final_ms: opts.horizon_ms.unwrap_or(FIG4_HORIZON_MS),
            observe_every_ms: TRAJECTORY_OBSERVE_MS,
            stepper: StepperConfig::rk4(FIG4_DT_US),
        }),
    };
    Ok(job)
}

/// Runs a figure job and writes `<dir>/<figure>.<ext>` with its sidecar.
pub fn reproduce_figure(
    fig: Figure,
    opts: &FigureOptions,
    run: &RunOptions,
    dir: &Path,
    format: OutputFormat,
) -> Result<(RunResult, Written)> {
    let job = figure_job(fig, opts)?;
    let result = job.run(run)?;
    let mut target = OutputTarget::new(dir, fig.name(), format);
    target.figure = Some(fig.name().into());
    target.notes = fig.notes();
    let written = write_outputs(&job, &result, &target, run)?;
    Ok((result, written))
}
