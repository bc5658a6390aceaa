//! Experiments that connect the particle system, its interface, the
//! macroscopic delta evolutions and the harness process.
//!
//! Every report is a pure function of its [`ExperimentConfig`]: replicas run
//! in parallel but are keyed by `(seed, scale index, replica)` and collected
//! in a fixed order.

mod config;
mod hydro;
mod runs;
mod sampling;
mod statistics;

pub use config::{ExperimentConfig, Numerical, Physical, Statistical};
pub use hydro::{
    coupled_micro_run, estimate_at, interface_from_macro, run_hydro_experiment, run_hydro_experiment_with, EpsReport,
    GapCertificate, HydroReport, MicroRun, SamplePoint,
};
pub use runs::{
    run_harness_hydro, run_invariant_experiment, run_stationary_experiment, HarnessHydroReport, HarnessRow,
    InvariantReport, StationaryReport, StationaryRow, WidthRow,
};
pub use sampling::{
    block_average, good_set_check, macro_block_average, sample_micro_from_macro, BlockAverages, GoodSetReport, SampleMode,
};
pub use statistics::{chi_square_homogeneity, hydro_statistic_density, hydro_statistic_interface, median, ChiSquareResult};

use macro_evolution::{MacroError, MacroInterface};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("cannot parse configuration: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Lattice(#[from] lattice_core::LatticeError),
    #[error(transparent)]
    Particle(#[from] particle_sim::SimError),
    #[error(transparent)]
    Interface(#[from] interface_sim::InterfaceError),
    #[error(transparent)]
    Macro(#[from] MacroError),
    #[error(transparent)]
    Harness(#[from] harness_process::HarnessError),
}

/// Seed of replica `k` at scale index `i`.
pub fn replica_seed(base: u64, i: usize, k: u64) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add(((i as u64) << 32) | k)
}

/// The stationary interface profile used as initial datum.
pub fn initial_profile(cfg: &ExperimentConfig) -> Result<MacroInterface, ExperimentError> {
    Ok(MacroInterface::stationary(cfg.profile_rate(), cfg.numerical.h)?)
}
