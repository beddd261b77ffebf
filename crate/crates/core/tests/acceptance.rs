//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines show in plain `cargo test`
//! output. Positional arguments select criteria by id prefix (`c6`); the
//! 300 ms three-atom run (c6b) is skipped unless `--ignored` is passed or
//! `RYDSTEADY_LONG=1` is set.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydsteady::dynamics::{
    evolve, lindblad_rhs, steady_state, EvolveOptions, Observable, StepperConfig,
    TrajectoryRecord,
};
use rydsteady::experiments::{
    figure_job, Figure, FigureOptions, InitialState, RunOptions, RunResult, TrajectoryTable,
};
use rydsteady::metrics::negativity;
use rydsteady::model::{
    collapse_ops, hamiltonian, microwave_hamiltonian, BasisSpec, CollapseVariant, Flavor,
    ModelSpec, TargetState,
};
use rydsteady::opalg::DensityMatrix;

/// Fidelity to |S₃⟩ at 5 ms checkpoints, 0 to 30 ms, from the exact
/// exponential action of the sparse 46656² Liouvillian (scipy
/// `expm_multiply`), built independently of this crate.
const FIG4_ORACLE: [(f64, f64); 7] = [
    (0.0, 0.0),
    (5.0, 0.0644076753),
    (10.0, 0.1365440732),
    (15.0, 0.2018562187),
    (20.0, 0.2606735518),
    (25.0, 0.3136384062),
    (30.0, 0.3613337193),
];
/// The oracle is printed to 10 decimals; the two integrations differ by
/// under 1e-9.
const FIG4_ORACLE_TOL: f64 = 1e-8;

struct Report {
    failures: usize,
    filters: Vec<String>,
    long: bool,
}

impl Report {
    fn selected(&self, id: &str) -> bool {
        self.filters.is_empty() || self.filters.iter().any(|f| id.starts_with(f.as_str()))
    }

    fn line(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id}: {}", detail.as_ref());
        if !pass {
            self.failures += 1;
        }
    }
}

fn run_trajectory_figure(fig: Figure, horizon_ms: Option<f64>) -> TrajectoryTable {
    let opts = FigureOptions {
        horizon_ms,
        ..Default::default()
    };
    let job = figure_job(fig, &opts).expect("preset");
    match job.run(&RunOptions::default()).expect("trajectory runs") {
        RunResult::Trajectory(t) => t,
        RunResult::Sweep(_) => unreachable!(),
    }
}

/// Worst |trace - 1| and smallest eigenvalue over a set of runs.
#[derive(Default)]
struct Health {
    trace_dev: f64,
    min_eig: f64,
    runs: usize,
}

impl Health {
    fn add(&mut self, traces: &[f64], mins: &[f64]) {
        self.runs += 1;
        for t in traces {
            self.trace_dev = self.trace_dev.max((t - 1.0).abs());
        }
        for &m in mins {
            self.min_eig = self.min_eig.min(m);
        }
    }

    fn add_table(&mut self, t: &TrajectoryTable) {
        let traces: Vec<f64> = t.rows.iter().map(|r| r.trace).collect();
        self.add(&traces, &t.min_eigenvalues);
    }

    fn add_record(&mut self, r: &TrajectoryRecord) {
        self.add(r.get("trace").unwrap(), r.get("min_eigenvalue").unwrap());
    }
}

fn c1(rep: &mut Report) {
    let mut lines = Vec::new();
    let mut hit = false;
    let mut slowest: f64 = 0.0;
    for flavor in FLAVORS {
        for variant in VARIANTS {
            let spec = two_atom(5.0, 1.0, flavor, variant);
            let start = Instant::now();
            let ss = steady_state(&spec).expect("steady state");
            let n = negativity(&ss.rho, 0).unwrap();
            slowest = slowest.max(start.elapsed().as_secs_f64());
            hit |= (n - 0.9991).abs() <= 0.002;
            lines.push(format!(
                "{flavor}/{variant}: N={n:.7}{}",
                if ss.unique { "" } else { " (non-unique)" }
            ));
        }
    }
    rep.line(
        "c1 fig2 peak",
        hit && slowest < 60.0,
        format!(
            "target 0.9991 +- 0.002 under some combination; slowest solve {slowest:.2}s; {}",
            lines.join(", ")
        ),
    );
}

fn c2(rep: &mut Report) {
    let job = figure_job(Figure::Fig3, &FigureOptions::default()).unwrap();
    let RunResult::Sweep(table) = job.run(&RunOptions::default()).unwrap() else {
        unreachable!()
    };
    let n: Vec<f64> = table.rows.iter().map(|r| r.negativity).collect();
    let min_step = n
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let pass = n.len() == 10 && n.iter().all(|x| x.is_finite()) && min_step >= -1e-4;
    let shown: Vec<String> = n.iter().map(|x| format!("{x:.5}")).collect();
    rep.line(
        "c2 fig2 monotonic in delta",
        pass,
        format!("smallest step N[i+1] - N[i] = {min_step:.2e} (need >= -1e-4); N = [{}]", shown.join(", ")),
    );
}

fn c3(rep: &mut Report, health: &mut Health) {
    let start = Instant::now();
    let table = run_trajectory_figure(Figure::Fig3Inset, None);
    let last = table.rows.last().unwrap();
    health.add_table(&table);
    rep.line(
        "c3 fig3 trajectory",
        last.t_ms == 100.0 && last.fidelity_target >= 0.90,
        format!(
            "F(Psi) at {} ms = {:.6} (need >= 0.90), {:.1}s",
            last.t_ms,
            last.fidelity_target,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn ground_populations(spec: &ModelSpec, stepper: StepperConfig) -> TrajectoryRecord {
    let rho0 = InitialState::GroundMixture.density_matrix(2).unwrap();
    let mut opts = EvolveOptions::new(1000.0, 1000.0, stepper);
    for i in BasisSpec::new(2).ground_indices() {
        opts = opts.observe(Observable::Population {
            name: format!("p{i}"),
            indices: vec![i],
        });
    }
    evolve(spec, &rho0, &opts).expect("evolution")
}

fn c4(rep: &mut Report, health: &mut Health) {
    let full = two_atom(0.5, 1.0, Flavor::Full, CollapseVariant::Independent);
    let eff = two_atom(0.5, 1.0, Flavor::Effective, CollapseVariant::Independent);
    let a = ground_populations(&full, StepperConfig::adaptive());
    let b = ground_populations(&eff, StepperConfig::adaptive());
    health.add_record(&a);
    health.add_record(&b);
    let worst = BasisSpec::new(2)
        .ground_indices()
        .into_iter()
        .map(|i| {
            let name = format!("p{i}");
            (a.get(&name).unwrap()[1] - b.get(&name).unwrap()[1]).abs()
        })
        .fold(0.0, f64::max);
    rep.line(
        "c4 full vs effective",
        worst < 5e-3,
        format!("max ground-population difference at 1 ms = {worst:.3e} (tol 5e-3)"),
    );
}

fn c5(rep: &mut Report) {
    let psi = DensityMatrix::from_pure(vec![6, 6], &TargetState::Psi.vector(2).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for delta in [0.5, 2.0, 5.0] {
        for gamma in [1.0, 10.0] {
            let spec = two_atom(delta, gamma, Flavor::Effective, CollapseVariant::PaperEffective);
            let out = lindblad_rhs(&hamiltonian(&spec).unwrap(), &collapse_ops(&spec).unwrap(), &psi)
                .unwrap();
            worst = worst.max(out.frobenius_norm());
        }
    }
    let three = ModelSpec::three_atom(0.5, 1.0);
    let s3 = TargetState::S3.vector(3).unwrap();
    let hs = microwave_hamiltonian(&three).unwrap().apply(&s3).unwrap();
    let hs_norm = hs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    rep.line(
        "c5 dark states",
        worst < 1e-12 && hs_norm < 1e-12,
        format!("|L_eff(Psi)|_F = {worst:.2e}, |H_mw S3| = {hs_norm:.2e} (tol 1e-12)"),
    );
}

fn c6a(rep: &mut Report, health: &mut Health) {
    let start = Instant::now();
    let table = run_trajectory_figure(Figure::Fig4, Some(30.0));
    health.add_table(&table);
    let at = |t: f64| {
        table
            .rows
            .iter()
            .find(|r| (r.t_ms - t).abs() < 1e-9)
            .map(|r| r.fidelity_target)
            .expect("checkpoint row")
    };
    let f: Vec<f64> = FIG4_ORACLE.iter().map(|&(t, _)| at(t)).collect();
    let increasing = f.windows(2).all(|w| w[1] > w[0]);
    let gain = f[f.len() - 1] - f[0];
    let oracle_err = FIG4_ORACLE
        .iter()
        .zip(&f)
        .map(|(&(_, want), got)| (got - want).abs())
        .fold(0.0, f64::max);
    let shown: Vec<String> = f.iter().map(|x| format!("{x:.6}")).collect();
    rep.line(
        "c6a fig4 30 ms",
        increasing && gain >= 0.2 && oracle_err <= FIG4_ORACLE_TOL,
        format!(
            "F(S3) on 5 ms checkpoints [{}]; gain {gain:.4} (need >= 0.2); \
             max oracle deviation {oracle_err:.1e} (tol {FIG4_ORACLE_TOL:e}); {:.0}s",
            shown.join(", "),
            start.elapsed().as_secs_f64()
        ),
    );
}

fn c6b(rep: &mut Report) {
    if !rep.long {
        println!("[SKIP] c6b fig4 300 ms: pass --ignored or set RYDSTEADY_LONG=1");
        return;
    }
    let start = Instant::now();
    let table = run_trajectory_figure(Figure::Fig4, None);
    let last = table.rows.last().unwrap();
    rep.line(
        "c6b fig4 300 ms",
        last.t_ms == 300.0 && (last.fidelity_target - 0.7915).abs() <= 0.03,
        format!(
            "F(S3) at {} ms = {:.6} (target 0.7915 +- 0.03), {:.0}s",
            last.t_ms,
            last.fidelity_target,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn random_entries(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn c7(rep: &mut Report, health: &mut Health) {
    if health.runs == 0 {
        health.add_table(&run_trajectory_figure(Figure::Fig3Inset, Some(10.0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut tr, mut herm, mut sup, mut sym) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut samples = 0;
    for flavor in FLAVORS {
        for variant in VARIANTS {
            for _ in 0..3 {
                let delta = rng.random_range(0.3..6.0);
                let gamma = rng.random_range(0.5..12.0);
                let spec = two_atom(delta, gamma, flavor, variant);
                let rho = state_from(vec![6, 6], &random_entries(&mut rng, 2 * 36 * 36));
                tr = tr.max(generator_trace(&spec, &rho).unwrap());
                herm = herm.max(generator_hermiticity(&spec, &rho).unwrap());
                sup = sup.max(superop_vs_matrix_free(&spec, &rho).unwrap());
                sym = sym.max(symmetric_vs_full(&spec, &rho).unwrap());
                samples += 1;
            }
        }
    }
    rep.line(
        "c7 generator tracelessness",
        tr < 1e-12,
        format!("max |tr L(rho)| = {tr:.1e} over {samples} random states (tol 1e-12)"),
    );
    rep.line(
        "c7 trace preservation",
        health.runs > 0 && health.trace_dev < 1e-9,
        format!(
            "max |tr rho - 1| = {:.1e} over {} trajectories (tol 1e-9)",
            health.trace_dev, health.runs
        ),
    );
    rep.line(
        "c7 positivity",
        health.runs > 0 && health.min_eig >= -1e-8,
        format!(
            "min eigenvalue = {:.1e} over {} trajectories (tol -1e-8)",
            health.min_eig, health.runs
        ),
    );
    rep.line(
        "c7 hermiticity",
        herm < 1e-12,
        format!("max |L(rho) - L(rho)^dag| = {herm:.1e} (tol 1e-12)"),
    );

    let psi = DensityMatrix::from_pure(vec![6, 6], &TargetState::Psi.vector(2).unwrap()).unwrap();
    let n_psi = negativity(&psi, 0).unwrap();
    rep.line(
        "c7 negativity of Psi",
        (n_psi - 1.0).abs() < 1e-12,
        format!("N = 1 {:+.1e} (tol 1e-12)", n_psi - 1.0),
    );

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = state_from(vec![6], &random_entries(&mut rng, 72));
        let b = state_from(vec![6], &random_entries(&mut rng, 72));
        worst = worst.max(product_negativity(&a, &b).unwrap().abs());
        let ka = DensityMatrix::from_pure(vec![6], &ket_from(&random_entries(&mut rng, 12))).unwrap();
        let kb = DensityMatrix::from_pure(vec![6], &ket_from(&random_entries(&mut rng, 12))).unwrap();
        worst = worst.max(product_negativity(&ka, &kb).unwrap().abs());
    }
    rep.line(
        "c7 product-state negativity",
        worst < 1e-10,
        format!("max |N| = {worst:.1e} over 40 product states (tol 1e-10)"),
    );
    rep.line(
        "c7 superoperator vs matrix-free",
        sup < 1e-12 && sym < 1e-12,
        format!("max difference {sup:.1e}, exchange-reduced {sym:.1e} (tol 1e-12)"),
    );

    let ratio = rk4_convergence_ratio();
    rep.line(
        "c7 rk4 order",
        (8.0..=32.0).contains(&ratio),
        format!("error ratio under halving = {ratio:.3} (need [8, 32])"),
    );

    let mut bloch: f64 = 0.0;
    for _ in 0..10 {
        let (d, w, g) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(0.05..3.0),
            rng.random_range(0.05..3.0),
        );
        bloch = bloch.max(bloch_steady_error(d, w, g).unwrap());
    }
    rep.line(
        "c7 optical bloch steady state",
        bloch < 1e-10,
        format!("max deviation from closed form = {bloch:.1e} (tol 1e-10)"),
    );

    let rabi = rabi_error(0.8, 20.0, 0.25).unwrap();
    rep.line(
        "c7 rabi oscillation",
        rabi < 1e-6,
        format!("max |P_e - sin^2(Omega t)| = {rabi:.1e} (tol 1e-6)"),
    );
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut rep = Report {
        failures: 0,
        filters: args.iter().filter(|a| !a.starts_with('-')).cloned().collect(),
        long: args.iter().any(|a| a == "--ignored" || a == "--include-ignored")
            || std::env::var("RYDSTEADY_LONG").is_ok_and(|v| v == "1"),
    };
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let mut health = Health {
        min_eig: f64::INFINITY,
        ..Default::default()
    };
    if rep.selected("c1") {
        c1(&mut rep);
    }
    if rep.selected("c2") {
        c2(&mut rep);
    }
    if rep.selected("c3") {
        c3(&mut rep, &mut health);
    }
    if rep.selected("c4") {
        c4(&mut rep, &mut health);
    }
    if rep.selected("c5") {
        c5(&mut rep);
    }
    if rep.selected("c6a") {
        c6a(&mut rep, &mut health);
    }
    if rep.selected("c6b") {
        c6b(&mut rep);
    }
    if rep.selected("c7") {
        c7(&mut rep, &mut health);
    }
    println!(
        "acceptance: {} failure(s), {:.0}s",
        rep.failures,
        start.elapsed().as_secs_f64()
    );
    if rep.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
