use harness_process::rescaled_harness;
use macro_evolution::{
    barrier_limit, delta_evolve, Barrier, BarrierSummary, EvolveOptions, MacroDensity,
};
use particle_sim::estimate_invariant_width;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::{initial_profile, replica_seed, ExperimentError, TOOL_VERSION};

/// 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, Serialize)]
pub struct WidthRow {
    pub rate: f64,
    pub seed: u64,
    pub burn: f64,
    pub window: f64,
    pub target: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub covered: bool,
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<WidthRow>,
}

/// Time-averaged width of the centered process against `1/(2J)`, for every rate in the config.
pub fn run_invariant_experiment(cfg: &ExperimentConfig) -> Result<InvariantReport, ExperimentError> {
    cfg.validate()?;
    let s = &cfg.statistical;
    let rows = cfg
        .physical
        .rates
        .par_iter()
        .enumerate()
        .map(|(i, &rate)| {
            let seed = replica_seed(cfg.seed, i, 0);
            let (burn, window) = (s.burn / rate, s.window / rate);
            let e = estimate_invariant_width(rate, burn, window, seed)?;
            let target = 1.0 / (2.0 * rate);
            let (ci_low, ci_high) = (e.value - Z95 * e.std_error, e.value + Z95 * e.std_error);
            Ok(WidthRow {
                rate,
                seed,
                burn,
                window,
                target,
                estimate: e.value,
                std_error: e.std_error,
                ci_low,
                ci_high,
                covered: ci_low <= target && target <= ci_high,
                relative_error: (e.value - target).abs() / target,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;
    Ok(InvariantReport { tool_version: TOOL_VERSION.into(), config: cfg.clone(), rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct StationaryRow {
    pub delta: f64,
    /// `sup |ρ_T - ρ̄|` after the last removal.
    pub sup_distance: f64,
    /// The same just before the last removal.
    pub pre_removal_sup_distance: f64,
    /// `sup_{a<b} |∫_a^b (ρ_T - ρ̄)|`.
    pub interval_distance: f64,
    pub fallbacks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StationaryReport {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<StationaryRow>,
    pub barrier: BarrierSummary,
    /// `sup |estimate - (φ̄ + 2jT)|`.
    pub estimate_error: f64,
}

/// Lower delta evolution started at the stationary density, for every block length of the ladder.
pub fn run_stationary_experiment(cfg: &ExperimentConfig) -> Result<StationaryReport, ExperimentError> {
    cfg.validate()?;
    let p = &cfg.physical;
    let n = &cfg.numerical;
    let j = cfg.profile_rate();
    let rho = MacroDensity::stationary(j, n.h)?;
    let opts = EvolveOptions { tail_tol: n.tail_tol, ..EvolveOptions::default() };
    let rows = (0..n.levels)
        .into_par_iter()
        .map(|k| {
            let delta = p.delta / (1u64 << k) as f64;
            let tr = delta_evolve(&rho, p.j, delta, p.t, Barrier::Lower, &opts)?;
            let last = tr.frames.last().expect("frames");
            let before = last.before.as_ref().unwrap_or(&last.profile);
            Ok(StationaryRow {
                delta,
                sup_distance: last.profile.sup_distance(&rho),
                pre_removal_sup_distance: before.sup_distance(&rho),
                interval_distance: last.profile.sup_interval_distance(&rho),
                fallbacks: tr.fallbacks,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;
    let phi0 = initial_profile(cfg)?;
    let limit = barrier_limit(&phi0, p.j, p.t, p.delta, n.levels, n.tail_tol, n.nesting_tol)?;
    let estimate_error = limit.estimate.sup_distance(&phi0.lifted(2.0 * p.j * p.t));
    Ok(StationaryReport { tool_version: TOOL_VERSION.into(), config: cfg.clone(), rows, barrier: limit.summary(), estimate_error })
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessRow {
    pub eps: f64,
    pub rate: f64,
    pub steps: u64,
    pub distance_to_estimate: f64,
    /// Distance to `φ̄ + 2jt` when the initial profile is stationary for `j`.
    pub distance_to_exact: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessHydroReport {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<HarnessRow>,
    pub decreasing: bool,
}

/// Rescaled harness runs against the barrier estimate, one per scale.
pub fn run_harness_hydro(cfg: &ExperimentConfig) -> Result<HarnessHydroReport, ExperimentError> {
    cfg.validate()?;
    let p = &cfg.physical;
    let n = &cfg.numerical;
    let phi0 = initial_profile(cfg)?;
    let limit = barrier_limit(&phi0, p.j, p.t, p.delta, n.levels, n.tail_tol, n.nesting_tol)?;
    let exact = (cfg.profile_rate() == p.j).then(|| phi0.lifted(2.0 * p.j * p.t));
    let rows: Vec<HarnessRow> = p
        .eps
        .par_iter()
        .map(|&eps| {
            let r = rescaled_harness(&phi0, p.j, eps, p.t)?;
            Ok(HarnessRow {
                eps,
                rate: r.rate,
                steps: r.state.steps(),
                distance_to_estimate: r.sup_distance(&limit.estimate),
                distance_to_exact: exact.as_ref().map(|e| r.sup_distance(e)),
            })
        })
        .collect::<Result<_, ExperimentError>>()?;
    let decreasing = rows.windows(2).all(|w| w[1].distance_to_estimate < w[0].distance_to_estimate);
    Ok(HarnessHydroReport { tool_version: TOOL_VERSION.into(), config: cfg.clone(), rows, decreasing })
}
