use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use experiments::{
    run_harness_hydro, run_hydro_experiment_with, run_invariant_experiment, run_stationary_experiment, ExperimentConfig,
    ExperimentError, TOOL_VERSION,
};
use harness_process::{delta_harness_sandwich, traveling_wave, write_harness_csv, HarnessError};
use interface_sim::{sandwich_run, FaultInjection};
use lattice_core::{Interface, ParticleConfig};
use macro_evolution::{
    delta_evolve, density_to_interface, write_density_csv, write_interface_csv, Barrier, EvolveOptions, MacroDensity,
    ProfileMeta,
};
use particle_sim::{simulate_centered, simulate_particle};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ssep", version, about = "Exclusion with free boundaries: simulations, macroscopic evolutions and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for CSV and JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Particle dynamics from a configuration written as `start:bits`.
    SimulateParticle {
        #[arg(long, default_value = "0:")]
        init: String,
        #[arg(long, default_value_t = 0.5)]
        j: f64,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        /// Shift after every birth and death so the median stays at 1/2.
        #[arg(long)]
        centered: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Lower, exact and upper interfaces on shared randomness, written as `start:height:steps`.
    SimulateInterface {
        #[arg(long, default_value = "0:0:")]
        init: String,
        #[arg(long, default_value_t = 0.5)]
        j: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, hide = true)]
        swap_barriers: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Delta evolution of a macroscopic density.
    MacroEvolve {
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, value_enum, default_value_t = BarrierArg::Lower)]
        barrier: BarrierArg,
        #[arg(long, value_enum, default_value_t = ProfileArg::Stationary)]
        profile: ProfileArg,
        /// Rate of the stationary initial profile; defaults to `j`.
        #[arg(long)]
        profile_j: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Harness sandwich started from the traveling wave.
    Harness {
        /// Microscopic rate `J`.
        #[arg(long, default_value_t = 0.05)]
        j: f64,
        #[arg(long, default_value_t = 100)]
        steps: u64,
        /// Block length in steps.
        #[arg(long, default_value_t = 5)]
        block: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Configured experiments.
    Experiment {
        #[arg(value_enum)]
        mode: Mode,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        j: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated, decreasing.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        replicas: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        swap_barriers: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BarrierArg {
    Lower,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Stationary,
    Heaviside,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Mode {
    Hydro,
    Invariant,
    Stationary,
    HarnessHydro,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Hydro => "hydro",
            Mode::Invariant => "invariant",
            Mode::Stationary => "stationary",
            Mode::HarnessHydro => "harness-hydro",
        }
    }
}

/// Bad input that clap could not catch: exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

/// A checked invariant failed: exit code 1.
#[derive(Debug, thiserror::Error)]
#[error("invariant violated: {0}")]
struct InvariantFailure(String);

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn prepare(out: &Option<PathBuf>) -> Result<Option<&Path>> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(out.as_deref())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn emit<T: Serialize>(dir: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
        _ => {}
    }
    if let Some(dir) = dir {
        fs::write(dir.join("summary.json"), text + "\n")?;
    }
    Ok(())
}

fn write_rows<T: Serialize>(dir: Option<&Path>, name: &str, rows: &[T]) -> Result<()> {
    if let Some(dir) = dir {
        let mut w = csv::Writer::from_writer(create(dir, name)?);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct InterfaceSummary {
    tool_version: &'static str,
    seed: u64,
    j: f64,
    delta: f64,
    t: f64,
    initial: String,
    lower: String,
    exact: String,
    upper: String,
    checks: u64,
    violations: usize,
}

#[derive(Serialize)]
struct MacroSummary {
    tool_version: &'static str,
    j: f64,
    delta: f64,
    t: f64,
    h: f64,
    fallbacks: usize,
    window: (f64, f64),
    mass_right_of_origin: f64,
    sup_distance_to_initial: f64,
    interval_distance_to_initial: f64,
}

#[derive(Serialize)]
struct HarnessSummary {
    tool_version: &'static str,
    rate: f64,
    steps: u64,
    block: u64,
    max_gap: f64,
    gap_bound: f64,
    min_margin: f64,
    /// `sup |K_n - (K_0 + 2Jn)|` for the exact harness.
    wave_deviation: f64,
}

#[derive(Serialize)]
struct HydroRow {
    eps: f64,
    seed: u64,
    density: f64,
    interface: f64,
    good_set: bool,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SimulateParticle { init, j, t, centered, common } => {
            let eta: ParticleConfig = init.parse().map_err(usage)?;
            let traj = if centered { simulate_centered(&eta, j, t, common.seed) } else { simulate_particle(&eta, j, t, common.seed) }
                .map_err(usage)?;
            let dir = prepare(&common.out)?;
            if let Some(dir) = dir {
                traj.write_csv(create(dir, "trajectory.csv")?)?;
            }
            let summary = traj.summary();
            emit(dir, &summary)?;
            if summary.median_violations > 0 {
                return Err(InvariantFailure(format!("{} median identity failures", summary.median_violations)).into());
            }
        }
        Command::SimulateInterface { init, j, delta, t, swap_barriers, common } => {
            let xi: Interface = init.parse().map_err(usage)?;
            if !(j >= 0.0 && delta > 0.0 && t >= 0.0) {
                return Err(usage(format!("need j >= 0, delta > 0, t >= 0; got {j}, {delta}, {t}")));
            }
            let run = sandwich_run(&xi, j, delta, t, common.seed, FaultInjection { swap_barriers });
            let dir = prepare(&common.out)?;
            let states = run.bundle.states();
            if let Some(dir) = dir {
                let mut w = csv::Writer::from_writer(create(dir, "interfaces.csv")?);
                w.write_record(["x", "lower", "exact", "upper"])?;
                let lo = states.iter().map(|s| s.bounds().0).min().unwrap_or(0) - 1;
                let hi = states.iter().map(|s| s.bounds().1).max().unwrap_or(0) + 1;
                for x in lo..=hi {
                    let mut rec = vec![x.to_string()];
                    rec.extend(states.iter().map(|s| s.get(x).to_string()));
                    w.write_record(&rec)?;
                }
                w.flush()?;
            }
            emit(
                dir,
                &InterfaceSummary {
                    tool_version: TOOL_VERSION,
                    seed: common.seed,
                    j,
                    delta,
                    t,
                    initial: xi.to_string(),
                    lower: states[0].to_string(),
                    exact: states[1].to_string(),
                    upper: states[2].to_string(),
                    checks: run.checks,
                    violations: run.violations.len(),
                },
            )?;
            if let Some(v) = run.violations.first() {
                return Err(InvariantFailure(format!(
                    "{} above {} at site {}, time {} ({} in total)",
                    v.lower,
                    v.upper,
                    v.site,
                    v.time,
                    run.violations.len()
                ))
                .into());
            }
        }
        Command::MacroEvolve { j, delta, t, h, barrier, profile, profile_j, common } => {
            let rho0 = match profile {
                ProfileArg::Stationary => MacroDensity::stationary(profile_j.unwrap_or(j), h).map_err(usage)?,
                ProfileArg::Heaviside => MacroDensity::heaviside(h),
            };
            let barrier = match barrier {
                BarrierArg::Lower => Barrier::Lower,
                BarrierArg::Upper => Barrier::Upper,
            };
            let tr = delta_evolve(&rho0, j, delta, t, barrier, &EvolveOptions::default()).map_err(usage)?;
            let last = tr.last();
            let dir = prepare(&common.out)?;
            if let Some(dir) = dir {
                let meta = ProfileMeta { j, delta, t };
                write_density_csv(create(dir, "density.csv")?, last, &meta)?;
                write_interface_csv(create(dir, "interface.csv")?, &density_to_interface(last, 2.0 * j * t), &meta)?;
            }
            emit(
                dir,
                &MacroSummary {
                    tool_version: TOOL_VERSION,
                    j,
                    delta,
                    t,
                    h,
                    fallbacks: tr.fallbacks,
                    window: last.window(),
                    mass_right_of_origin: last.mass_right(0.0),
                    sup_distance_to_initial: last.sup_distance(&rho0),
                    interval_distance_to_initial: last.sup_interval_distance(&rho0),
                },
            )?;
        }
        Command::Harness { j, steps, block, common } => {
            let wave = traveling_wave(j).map_err(usage)?;
            let report = match delta_harness_sandwich(&wave, j, block, steps) {
                Ok(r) => r,
                Err(e @ HarnessError::Sandwich { .. }) => return Err(InvariantFailure(e.to_string()).into()),
                Err(e) => return Err(usage(e)),
            };
            let target = wave.lifted(2.0 * j * steps as f64);
            let (a, b) = report.exact.difference_range(&target);
            let dir = prepare(&common.out)?;
            if let Some(dir) = dir {
                write_harness_csv(create(dir, "harness.csv")?, &report.exact, j)?;
            }
            let gap_bound = 2.0 * j * block as f64;
            emit(
                dir,
                &HarnessSummary {
                    tool_version: TOOL_VERSION,
                    rate: j,
                    steps,
                    block,
                    max_gap: report.max_gap,
                    gap_bound,
                    min_margin: report.min_margin,
                    wave_deviation: a.abs().max(b.abs()),
                },
            )?;
            if report.max_gap > gap_bound + 1e-12 {
                return Err(InvariantFailure(format!("harness gap {} exceeds {gap_bound}", report.max_gap)).into());
            }
        }
        Command::Experiment { mode, config, j, delta, eps, t, replicas, seed, out, swap_barriers } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path).map_err(usage)?,
                None => ExperimentConfig { name: mode.name().into(), ..ExperimentConfig::default() },
            };
            if let Some(v) = j {
                cfg.physical.j = v;
                if mode == Mode::Invariant {
                    cfg.physical.rates = vec![v];
                }
            }
            if let Some(v) = delta {
                cfg.physical.delta = v;
            }
            if let Some(v) = eps {
                cfg.physical.eps = v;
            }
            if let Some(v) = t {
                cfg.physical.t = v;
            }
            if let Some(v) = replicas {
                cfg.statistical.replicas = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if out.is_some() {
                cfg.output_dir = out;
            }
            cfg.validate().map_err(usage)?;
            let dir = prepare(&cfg.output_dir)?;
            let failed = |e: ExperimentError| -> anyhow::Error {
                match e {
                    ExperimentError::Config(_) | ExperimentError::Toml(_) => usage(e),
                    other => other.into(),
                }
            };
            match mode {
                Mode::Hydro => {
                    let report = run_hydro_experiment_with(&cfg, FaultInjection { swap_barriers }).map_err(failed)?;
                    let rows: Vec<HydroRow> = report
                        .points
                        .iter()
                        .flat_map(|p| {
                            (0..p.seeds.len()).map(move |k| HydroRow {
                                eps: p.eps,
                                seed: p.seeds[k],
                                density: p.density[k],
                                interface: p.interface[k],
                                good_set: p.good_set[k],
                            })
                        })
                        .collect();
                    write_rows(dir, "hydro.csv", &rows)?;
                    emit(dir, &report)?;
                    if report.sandwich_violations() > 0 {
                        return Err(InvariantFailure(format!("{} sandwich violations", report.sandwich_violations())).into());
                    }
                }
                Mode::Invariant => {
                    let report = run_invariant_experiment(&cfg).map_err(failed)?;
                    write_rows(dir, "invariant.csv", &report.rows)?;
                    emit(dir, &report)?;
                }
                Mode::Stationary => {
                    let report = run_stationary_experiment(&cfg).map_err(failed)?;
                    write_rows(dir, "stationary.csv", &report.rows)?;
                    emit(dir, &report)?;
                }
                Mode::HarnessHydro => {
                    let report = run_harness_hydro(&cfg).map_err(failed)?;
                    write_rows(dir, "harness_hydro.csv", &report.rows)?;
                    emit(dir, &report)?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
