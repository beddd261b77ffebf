//! `rydsteady`: steady states, trajectories, sweeps and figure data from the
//! command line.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for solver
//! failures, 1 for I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rydsteady::experiments::{
    replay, reproduce_figure, write_outputs, Axis, DerivedRules, Figure, FigureOptions, Job,
    OutputFormat, OutputTarget, PointStatus, RunOptions, RunResult, SweepParam, SweepSpec,
    TrajectorySpec,
};
use rydsteady::model::{CollapseVariant, Flavor, ModelConfig, ModelOverrides};
use rydsteady::Error;

#[derive(Debug, Parser)]
#[command(name = "rydsteady", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady state of one model configuration.
    Steady {
        /// Model configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Also write a one-row table here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Time evolution from a trajectory configuration.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Replaces the configured `t_final_ms`.
        #[arg(long)]
        horizon_ms: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Steady-state sweep over one or two parameters.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Data behind one figure: fig2, fig3, fig3-inset or fig4.
    Figure {
        name: String,
        /// Partial model configuration applied to the preset (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Trajectory length for fig3-inset and fig4.
        #[arg(long)]
        horizon_ms: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-runs the job recorded in a `.meta.json` sidecar.
    Replay {
        meta: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, env = "RYDSTEADY_JOBS", default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    flavor: Option<Flavor>,
    #[arg(long)]
    collapse_variant: Option<CollapseVariant>,
    /// Worker threads for sweeps.
    #[arg(long, env = "RYDSTEADY_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Write zero wall times so output files are reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Output file stem; defaults to the config file's stem.
    #[arg(long)]
    stem: Option<String>,
}

impl Common {
    fn overrides(&self) -> ModelOverrides {
        ModelOverrides {
            flavor: self.flavor,
            collapse_variant: self.collapse_variant,
            ..Default::default()
        }
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            jobs: self.jobs,
            timing: !self.no_timing,
        }
    }

    fn target(&self, out: &Path, config: &Path) -> OutputTarget {
        let stem = self.stem.clone().unwrap_or_else(|| {
            config
                .file_stem()
                .map_or("out".into(), |s| s.to_string_lossy().into_owned())
        });
        OutputTarget::new(out, stem, self.format)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_config_error() => 2,
        Error::Io(_) | Error::Csv(_) => 1,
        _ => 3,
    }
}

/// A single-point sweep that keeps the configuration exactly as given.
fn steady_job(cfg: ModelConfig) -> Job {
    let mut spec = SweepSpec::new(
        cfg.clone(),
        vec![Axis::values(SweepParam::DeltaMhz, vec![cfg.delta_mhz])],
    );
    spec.derived = DerivedRules {
        microwave: false,
        interaction: false,
    };
    Job::Sweep(spec)
}

fn run_and_write(
    job: &Job,
    target: &OutputTarget,
    opts: &RunOptions,
) -> rydsteady::Result<RunResult> {
    let result = job.run(opts)?;
    let written = write_outputs(job, &result, target, opts)?;
    eprintln!("wrote {} and {}", written.data.display(), written.meta.display());
    Ok(result)
}

fn run(cli: Cli) -> rydsteady::Result<String> {
    match cli.command {
        Command::Steady {
            config,
            out,
            common,
        } => {
            let cfg = common.overrides().apply(&ModelConfig::load(&config)?);
            cfg.resolve()?;
            let job = steady_job(cfg);
            let opts = common.run_options();
            let result = match &out {
                Some(dir) => run_and_write(&job, &common.target(dir, &config), &opts)?,
                None => job.run(&opts)?,
            };
            let RunResult::Sweep(table) = &result else {
                unreachable!("steady jobs are sweeps")
            };
            let row = &table.rows[0];
            if let PointStatus::Error(msg) = &row.status {
                return Err(Error::Solver(msg.clone()));
            }
            Ok(format!(
                "negativity={} fidelity_psi={} residual={:.3e} status={}",
                row.negativity, row.fidelity_psi, row.residual, row.status
            ))
        }
        Command::Evolve {
            config,
            out,
            horizon_ms,
            common,
        } => {
            let mut spec = TrajectorySpec::load(&config)?;
            spec.model = common.overrides().apply(&spec.model);
            if let Some(h) = horizon_ms {
                spec.t_final_ms = h;
            }
            let job = Job::Trajectory(spec);
            let result = run_and_write(&job, &common.target(&out, &config), &common.run_options())?;
            Ok(result.summary())
        }
        Command::Sweep {
            config,
            out,
            common,
        } => {
            let mut spec = SweepSpec::load(&config)?;
            spec.base = common.overrides().apply(&spec.base);
            let job = Job::Sweep(spec);
            let result = run_and_write(&job, &common.target(&out, &config), &common.run_options())?;
            Ok(result.summary())
        }
        Command::Figure {
            name,
            config,
            out,
            horizon_ms,
            common,
        } => {
            let fig: Figure = name.parse()?;
            let mut overrides = match &config {
                Some(path) => ModelOverrides::load(path)?,
                None => ModelOverrides::default(),
            };
            overrides.flavor = common.flavor.or(overrides.flavor);
            overrides.collapse_variant = common.collapse_variant.or(overrides.collapse_variant);
            let opts = FigureOptions {
                overrides,
                horizon_ms,
            };
            let (result, written) =
                reproduce_figure(fig, &opts, &common.run_options(), &out, common.format)?;
            eprintln!("wrote {} and {}", written.data.display(), written.meta.display());
            Ok(result.summary())
        }
        Command::Replay { meta, out, jobs } => {
            let (result, written) = replay(&meta, &out, jobs)?;
            eprintln!("wrote {} and {}", written.data.display(), written.meta.display());
            Ok(result.summary())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli) {
        Ok(summary) => {
            println!("{summary} wall_s={:.3}", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
