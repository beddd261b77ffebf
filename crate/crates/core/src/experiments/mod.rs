//! Parameter sweeps, trajectory runs and figure presets, with their CSV/JSON
//! tables and `.meta.json` sidecars.
//!
//! A sidecar records the explicit job, so [`replay`] regenerates the table
//! bit for bit when wall times were disabled.

mod figures;
mod output;
mod sweep;
mod trajectory;

pub use figures::{
    figure_job, reproduce_figure, Figure, FigureOptions, DELTA_GRID_MHZ, FIG3_INSET_HORIZON_MS,
    FIG4_DT_US, FIG4_HORIZON_MS, GAMMA_GRID_KHZ, TRAJECTORY_OBSERVE_MS,
};
pub use output::{
    format_float, replay, write_outputs, Job, Metadata, OutputFormat, OutputTarget, RunResult,
    Written, VERSION,
};
pub use sweep::{
    run_sweep, steady_row, Axis, DerivedRules, PointStatus, RunOptions, SweepMetric, SweepParam,
    SweepRow, SweepSpec, SweepTable,
};
pub use trajectory::{
    run_trajectory, InitialState, TrajectoryRow, TrajectorySpec, TrajectoryTable,
};
