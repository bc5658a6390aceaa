use harness_process::rescaled_harness;
use interface_sim::{standard_paths, ArrowStream, CoupledBundle, Driver, FaultInjection, KillingClocks, Member, StandardPaths};
use lattice_core::Interface;
use macro_evolution::{barrier_limit, interface_to_density, BarrierLimit, BarrierSummary, MacroInterface};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::sampling::{good_set_check, sample_micro_from_macro, SampleMode};
use crate::statistics::{hydro_statistic_density, hydro_statistic_interface, median};
use crate::{initial_profile, replica_seed, ExperimentError, TOOL_VERSION};

/// Microscopic interface at scale `ε` whose rescaling approximates `φ`.
pub fn interface_from_macro(phi: &MacroInterface, eps: f64, mode: SampleMode, seed: u64) -> Result<Interface, ExperimentError> {
    let rho = interface_to_density(phi)?;
    let eta = sample_micro_from_macro(&rho, eps, mode, seed);
    let v1 = eta.median_floor() + 1;
    let target = phi.offset() / eps;
    let mut v2 = target.round() as i64;
    if (v1 + v2).rem_euclid(2) != 0 {
        v2 += if target >= v2 as f64 { 1 } else { -1 };
    }
    Ok(Interface::from_particles(&eta, v2.max(0))?)
}

/// Exact process at the requested times, run alongside its two delta barriers.
#[derive(Clone, Debug)]
pub struct MicroRun {
    pub states: Vec<(f64, Interface)>,
    pub checks: u64,
    pub violations: usize,
}

pub fn coupled_micro_run(xi: &Interface, rate: f64, block: f64, times: &[f64], seed: u64, fault: FaultInjection) -> MicroRun {
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let clocks = KillingClocks::new(seed, rate);
    let StandardPaths { exact, mut lower, mut upper, .. } = standard_paths(xi.vertex(), &clocks, block, horizon);
    if fault.swap_barriers {
        std::mem::swap(&mut lower, &mut upper);
    }
    let members = vec![
        Member::new("lower", xi.clone(), Driver::Path(lower)),
        Member::new("exact", xi.clone(), Driver::Path(exact)),
        Member::new("upper", xi.clone(), Driver::Path(upper)),
    ];
    let mut bundle = CoupledBundle::new(ArrowStream::new(seed), clocks, members);
    let ordered = |m: &[Member]| m.windows(2).filter(|w| w[0].state.first_excess(&w[1].state).is_some()).count();
    let mut violations = ordered(bundle.members());
    let mut checks = 1u64;
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        bundle.advance(t, |_, _, m| {
            checks += 1;
            violations += ordered(m);
        });
        states.push((t, bundle.members()[1].state.clone()));
    }
    MicroRun { states, checks, violations }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapCertificate {
    pub delta: f64,
    pub max_sup_gap: f64,
    pub max_mass_gap: f64,
    /// Mass gap within `jδ`.
    pub mass_within: bool,
    /// Sup gap within `2jδ`, the cone spread of one block.
    pub sup_within_cone: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplePoint {
    pub t: f64,
    pub density_median: f64,
    pub interface_median: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsReport {
    pub eps: f64,
    pub rate: f64,
    pub micro_horizon: f64,
    pub micro_block: f64,
    pub seeds: Vec<u64>,
    /// Per-seed statistics at the horizon.
    pub density: Vec<f64>,
    pub interface: Vec<f64>,
    pub good_set: Vec<bool>,
    pub density_median: f64,
    pub interface_median: f64,
    pub good_fraction: f64,
    pub samples: Vec<SamplePoint>,
    pub sandwich_checks: u64,
    pub sandwich_violations: usize,
    /// Sup distance of the rescaled harness to the barrier estimate.
    pub harness_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HydroReport {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub barrier: BarrierSummary,
    pub certificates: Vec<GapCertificate>,
    pub points: Vec<EpsReport>,
    pub density_decreasing: bool,
    pub interface_decreasing: bool,
    pub harness_decreasing: bool,
}

impl HydroReport {
    pub fn sandwich_violations(&self) -> usize {
        self.points.iter().map(|p| p.sandwich_violations).sum()
    }
}

fn strictly_decreasing(xs: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = xs.collect();
    v.windows(2).all(|w| w[1] < w[0])
}

/// Barrier estimate at a block end of the finest level.
pub fn estimate_at(limit: &BarrierLimit, t: f64) -> Result<MacroInterface, ExperimentError> {
    let pair = limit.pairs.last().expect("ladder has levels");
    match (pair.lower.at(t), pair.upper.at(t)) {
        (Some(lo), Some(up)) => Ok(lo.midpoint(up)),
        _ => Err(ExperimentError::Config(format!("time {t} is not a block end of the finest level"))),
    }
}

struct ReplicaOutcome {
    per_time: Vec<(f64, f64)>,
    good: bool,
    checks: u64,
    violations: usize,
}

pub fn run_hydro_experiment(cfg: &ExperimentConfig) -> Result<HydroReport, ExperimentError> {
    run_hydro_experiment_with(cfg, FaultInjection::default())
}

pub fn run_hydro_experiment_with(cfg: &ExperimentConfig, fault: FaultInjection) -> Result<HydroReport, ExperimentError> {
    cfg.validate()?;
    let p = &cfg.physical;
    let n = &cfg.numerical;
    let phi0 = initial_profile(cfg)?;
    let limit = barrier_limit(&phi0, p.j, p.t, p.delta, n.levels, n.tail_tol, n.nesting_tol)?;
    let times = cfg.sample_times();
    let targets: Vec<(MacroInterface, _)> = times
        .iter()
        .map(|&t| {
            let phi = estimate_at(&limit, t)?;
            let rho = interface_to_density(&phi)?;
            Ok((phi, rho))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let finest = cfg.finest_delta();

    let jobs: Vec<(usize, u64)> = (0..p.eps.len()).flat_map(|i| (0..cfg.statistical.replicas).map(move |k| (i, k))).collect();
    let outcomes: Vec<ReplicaOutcome> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let eps = p.eps[i];
            let seed = replica_seed(cfg.seed, i, k);
            let xi0 = interface_from_macro(&phi0, eps, n.sampler, seed)?;
            let micro_times: Vec<f64> = times.iter().map(|t| t / (eps * eps)).collect();
            let run = coupled_micro_run(&xi0, eps * p.j, finest / (eps * eps), &micro_times, seed, fault);
            let per_time = run
                .states
                .iter()
                .zip(&targets)
                .map(|((_, xi), (phi, rho))| (hydro_statistic_density(&xi.to_particles(), rho, eps), hydro_statistic_interface(xi, phi, eps)))
                .collect();
            let last = &run.states.last().expect("at least one time").1;
            let good = good_set_check(&last.to_particles(), &targets.last().expect("horizon").1, eps, n.alpha, n.beta).good;
            Ok(ReplicaOutcome { per_time, good, checks: run.checks, violations: run.violations })
        })
        .collect::<Result<_, ExperimentError>>()?;

    let mut points = Vec::with_capacity(p.eps.len());
    for (i, &eps) in p.eps.iter().enumerate() {
        let r = cfg.statistical.replicas as usize;
        let mine = &outcomes[i * r..(i + 1) * r];
        let samples: Vec<SamplePoint> = times
            .iter()
            .enumerate()
            .map(|(ti, &t)| {
                let d: Vec<f64> = mine.iter().map(|o| o.per_time[ti].0).collect();
                let f: Vec<f64> = mine.iter().map(|o| o.per_time[ti].1).collect();
                SamplePoint { t, density_median: median(&d), interface_median: median(&f) }
            })
            .collect();
        let last = times.len() - 1;
        let density: Vec<f64> = mine.iter().map(|o| o.per_time[last].0).collect();
        let interface: Vec<f64> = mine.iter().map(|o| o.per_time[last].1).collect();
        let good_set: Vec<bool> = mine.iter().map(|o| o.good).collect();
        let harness = rescaled_harness(&phi0, p.j, eps, p.t)?;
        points.push(EpsReport {
            eps,
            rate: eps * p.j,
            micro_horizon: p.t / (eps * eps),
            micro_block: finest / (eps * eps),
            seeds: (0..r as u64).map(|k| replica_seed(cfg.seed, i, k)).collect(),
            density_median: median(&density),
            interface_median: median(&interface),
            good_fraction: good_set.iter().filter(|&&g| g).count() as f64 / r as f64,
            density,
            interface,
            good_set,
            samples,
            sandwich_checks: mine.iter().map(|o| o.checks).sum(),
            sandwich_violations: mine.iter().map(|o| o.violations).sum(),
            harness_distance: harness.sup_distance(&limit.estimate),
        });
    }

    let certificates = limit
        .levels
        .iter()
        .map(|l| GapCertificate {
            delta: l.delta,
            max_sup_gap: l.max_sup_gap,
            max_mass_gap: l.max_mass_gap,
            mass_within: l.max_mass_gap <= p.j * l.delta + 1e-9,
            sup_within_cone: l.max_sup_gap <= 2.0 * p.j * l.delta + 1e-9,
        })
        .collect();
    Ok(HydroReport {
        tool_version: TOOL_VERSION.into(),
        config: cfg.clone(),
        barrier: limit.summary(),
        certificates,
        density_decreasing: strictly_decreasing(points.iter().map(|p| p.density_median)),
        interface_decreasing: strictly_decreasing(points.iter().map(|p| p.interface_median)),
        harness_decreasing: strictly_decreasing(points.iter().map(|p| p.harness_distance)),
        points,
    })
}
