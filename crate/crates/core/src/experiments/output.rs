//! CSV/JSON tables and their `.meta.json` sidecars.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::sweep::{run_sweep, PointStatus, RunOptions, SweepSpec, SweepTable};
use super::trajectory::{run_trajectory, TrajectorySpec, TrajectoryTable};
use crate::dynamics::StepStats;
use crate::model::{CollapseVariant, Flavor, ModelConfig};
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config("format", format!("unknown format `{s}`"))),
        }
    }
}

/// A complete, replayable unit of work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "spec", rename_all = "kebab-case")]
pub enum Job {
    Sweep(SweepSpec),
    Trajectory(TrajectorySpec),
}

impl Job {
    /// Same job with every default and grid written out.
    pub fn explicit(&self) -> Result<Job> {
        Ok(match self {
            Job::Sweep(s) => {
                let mut s = s.expanded()?;
                s.base = s.base.explicit();
                Job::Sweep(s)
            }
            Job::Trajectory(t) => Job::Trajectory(t.explicit()),
        })
    }

    fn base(&self) -> &ModelConfig {
        match self {
            Job::Sweep(s) => &s.base,
            Job::Trajectory(t) => &t.model,
        }
    }

    pub fn run(&self, opts: &RunOptions) -> Result<RunResult> {
        match self {
            Job::Sweep(s) => Ok(RunResult::Sweep(run_sweep(s, opts)?)),
            Job::Trajectory(t) => Ok(RunResult::Trajectory(run_trajectory(t)?)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum RunResult {
    Sweep(SweepTable),
    Trajectory(TrajectoryTable),
}

impl RunResult {
    pub fn resolved(&self) -> Vec<ModelConfig> {
        match self {
            RunResult::Sweep(t) => t.points.clone(),
            RunResult::Trajectory(t) => vec![t.spec.model.clone()],
        }
    }

    /// One line of key metrics.
    pub fn summary(&self) -> String {
        match self {
            RunResult::Sweep(t) => {
                let ok = t.rows.iter().filter(|r| r.status == PointStatus::Ok).count();
                let best = t
                    .rows
                    .iter()
                    .filter(|r| !r.negativity.is_nan())
                    .max_by(|a, b| a.negativity.total_cmp(&b.negativity));
                let worst_res = t
                    .rows
                    .iter()
                    .map(|r| r.residual)
                    .filter(|r| !r.is_nan())
                    .fold(f64::NAN, f64::max);
                let mut s = format!("rows={} ok={} max_residual={worst_res:.3e}", t.rows.len(), ok);
                if let Some(b) = best {
                    s += &format!(
                        " max_negativity={:.6} at delta_mhz={} gamma_khz={}",
                        b.negativity, b.delta_mhz, b.gamma_khz
                    );
                }
                s
            }
            RunResult::Trajectory(t) => {
                let last = t.rows.last().expect("at least the initial row");
                format!(
                    "t_ms={} fidelity_target={:.6} p_ground={:.6} trace={:.12} steps={}",
                    last.t_ms,
                    last.fidelity_target,
                    last.p_ground,
                    last.trace,
                    t.stats.accepted
                )
            }
        }
    }
}

/// Sidecar written next to every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub generator: String,
    pub version: String,
    pub stem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    pub format: OutputFormat,
    /// False when wall times were zeroed for reproducible output.
    pub timing: bool,
    pub flavor: Flavor,
    pub collapse_variant: CollapseVariant,
    pub job: Job,
    /// Resolved parameters of every row (sweeps) or of the run.
    pub resolved: Vec<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<StepStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn load(path: &Path) -> Result<Self> {
        crate::model::parse_config(&crate::model::read_config(path)?)
    }
}

/// Naming and formatting of one run's output files.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTarget {
    pub dir: PathBuf,
    pub stem: String,
    pub format: OutputFormat,
    pub figure: Option<String>,
    pub notes: Vec<String>,
}

impl OutputTarget {
    pub fn new(dir: impl Into<PathBuf>, stem: impl Into<String>, format: OutputFormat) -> Self {
        OutputTarget {
            dir: dir.into(),
            stem: stem.into(),
            format,
            figure: None,
            notes: Vec::new(),
        }
    }

    pub fn data_path(&self) -> PathBuf {
        self.dir
            .join(format!("{}.{}", self.stem, self.format.extension()))
    }

    pub fn meta_path(&self) -> PathBuf {
        self.dir.join(format!("{}.meta.json", self.stem))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Written {
    pub data: PathBuf,
    pub meta: PathBuf,
}

/// Shortest text that parses back to the same bits; scientific notation
/// outside [1e-4, 1e15).
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn rows_of(result: &RunResult) -> (Vec<&'static str>, Vec<Vec<Value>>) {
    let num = |x: f64| -> Value {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    };
    match result {
        RunResult::Sweep(t) => (
            SweepTable::COLUMNS.to_vec(),
            t.rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.delta_mhz),
                        num(r.gamma_khz),
                        num(r.negativity),
                        num(r.fidelity_psi),
                        num(r.residual),
                        Value::String(r.status.to_string()),
                        num(r.wall_ms),
                    ]
                })
                .collect(),
        ),
        RunResult::Trajectory(t) => (
            TrajectoryTable::COLUMNS.to_vec(),
            t.rows
                .iter()
                .map(|r| {
                    [
                        r.t_ms,
                        r.p_psi,
                        r.p_phi,
                        r.p_upsilon,
                        r.p_ground,
                        r.fidelity_target,
                        r.trace,
                    ]
                    .map(num)
                    .to_vec()
                })
                .collect(),
        ),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => "NaN".into(),
        Value::Number(n) => format_float(n.as_f64().expect("finite f64")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_table(result: &RunResult, path: &Path, format: OutputFormat) -> Result<()> {
    let (columns, rows) = rows_of(result);
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(&columns)?;
            for row in &rows {
                w.write_record(row.iter().map(csv_cell))?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let objects: Vec<Value> = rows
                .into_iter()
                .map(|row| {
                    Value::Object(
                        columns
                            .iter()
                            .map(|c| c.to_string())
                            .zip(row)
                            .collect::<Map<_, _>>(),
                    )
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&Value::Array(objects))?;
            text.push('\n');
            fs::write(path, text)?;
        }
    }
    Ok(())
}

/// Writes the table and its sidecar.
pub fn write_outputs(
    job: &Job,
    result: &RunResult,
    target: &OutputTarget,
    opts: &RunOptions,
) -> Result<Written> {
    fs::create_dir_all(&target.dir)?;
    let job = job.explicit()?;
    let base = job.base();
    let meta = Metadata {
        generator: "rydsteady".into(),
        version: VERSION.into(),
        stem: target.stem.clone(),
        figure: target.figure.clone(),
        format: target.format,
        timing: opts.timing,
        flavor: base.flavor,
        collapse_variant: base.collapse_variant.expect("explicit"),
        resolved: result.resolved(),
        stats: match result {
            RunResult::Trajectory(t) => Some(t.stats),
            RunResult::Sweep(_) => None,
        },
        notes: target.notes.clone(),
        job,
    };
    let written = Written {
        data: target.data_path(),
        meta: target.meta_path(),
    };
    write_table(result, &written.data, target.format)?;
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    fs::write(&written.meta, text)?;
    Ok(written)
}

/// Re-runs the job recorded in a sidecar and writes the same files into
/// `dir`.
pub fn replay(meta_path: &Path, dir: &Path, jobs: usize) -> Result<(RunResult, Written)> {
    let meta = Metadata::load(meta_path)?;
    let opts = RunOptions {
        jobs,
        timing: meta.timing,
    };
    let result = meta.job.run(&opts)?;
    let target = OutputTarget {
        dir: dir.to_path_buf(),
        stem: meta.stem,
        format: meta.format,
        figure: meta.figure,
        notes: meta.notes,
    };
    let written = write_outputs(&meta.job, &result, &target, &opts)?;
    Ok((result, written))
}
