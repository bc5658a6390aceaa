//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion, followed by indented diagnostics.
//! Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use experiments::{chi_square_homogeneity, estimate_at, run_hydro_experiment, ExperimentConfig};
use harness_process::{delta_harness_sandwich, harness_evolve, traveling_wave, HarnessState};
use interface_sim::{
    coupled_delta_sandwich, coupled_rate_ordering, evolve_with_vertex_path, height_identity_check, standard_paths,
    ArrowStream, KillingClocks,
};
use lattice_core::rng;
use lattice_core::{Interface, ParticleConfig, Vertex};
use macro_evolution::{
    barrier_ladder, cone_margin, delta_evolve, j_monotonicity_check, Barrier, EvolveOptions, MacroDensity, MacroInterface,
};
use particle_sim::{drift_check_psi, estimate_invariant_width, median_walk_ensemble, psi_drift_exact};
use rand::Rng;
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self { pass, summary: summary.into(), notes: Vec::new() }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn invariant_width() -> Outcome {
    let rows: Vec<(f64, f64, f64)> = [0.25, 0.5, 1.0]
        .par_iter()
        .enumerate()
        .map(|(i, &rate)| {
            let e = estimate_invariant_width(rate, 1e4 / rate, 1e5 / rate, 100 + i as u64).expect("width run");
            (rate, e.value, e.std_error)
        })
        .collect();
    let mut out = Outcome::new(true, "");
    let mut parts = Vec::new();
    for (rate, value, se) in rows {
        let target = 1.0 / (2.0 * rate);
        let rel = (value - target).abs() / target;
        out.pass &= rel <= 0.05;
        parts.push(format!("J={rate}: {value:.4} vs {target} ({:.2}%)", 100.0 * rel));
        out.notes.push(format!("J={rate}: batch-means standard error {se:.4}"));
    }
    out.summary = format!("{} (tolerance 5%)", parts.join(", "));
    out
}

fn median_walk() -> Outcome {
    let (rate, t, n) = (0.5, 1e3, 4000u64);
    let samples = median_walk_ensemble(&ParticleConfig::heaviside(0), rate, t, n, 7).expect("median walk");
    let xs: Vec<f64> = samples.iter().map(|s| s.displacement as f64).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let se = (var / n as f64).sqrt();
    let violations: u64 = samples.iter().map(|s| s.violations).sum();
    let target = 2.0 * rate * t;
    let pass = mean.abs() <= 3.0 * se && (var - target).abs() <= 0.1 * target && violations == 0;
    Outcome::new(
        pass,
        format!("{n} replicas: mean {mean:.2} (3 SE = {:.2}), variance {var:.1} vs {target} (10%), identity violations {violations}", 3.0 * se),
    )
}

fn sandwich_and_rate_ordering() -> Outcome {
    let xi = Interface::cone(Vertex::ORIGIN);
    let sandwich: (usize, u64) = (0..100u64)
        .into_par_iter()
        .map(|seed| match coupled_delta_sandwich(&xi, 0.5, 1.0, 10.0, seed) {
            Ok(run) => (0, run.checks),
            Err(_) => (1, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let ordering: usize = (0..50u64)
        .into_par_iter()
        .map(|seed| coupled_rate_ordering(&xi, 1.0, 0.5, 10.0, 1000 + seed).map_or(1, |_| 0))
        .sum();
    Outcome::new(
        sandwich.0 == 0 && ordering == 0,
        format!("delta sandwich: {} of 100 runs violated ({} checks); rate ordering: {ordering} of 50 runs violated", sandwich.0, sandwich.1),
    )
}

/// Random interface with vertex at the origin.
fn random_centered_interface(seed: u64) -> Interface {
    let mut g = rng::keyed(&[seed, 0xACCE]);
    let len = g.gen_range(0..12);
    let bits: Vec<bool> = (0..len).map(|_| g.gen()).collect();
    let eta = ParticleConfig::from_window(0, &bits);
    let eta = eta.shifted(-(eta.median_floor() + 1));
    Interface::from_particles(&eta, 0).expect("parity holds at the origin")
}

fn height_identity() -> Outcome {
    let reports: Vec<_> = (0..100u64)
        .into_par_iter()
        .map(|seed| height_identity_check(&random_centered_interface(seed), 0.5, 50.0, seed).expect("centered start"))
        .collect();
    let failed = reports.iter().filter(|r| !r.holds).count();
    let checks: u64 = reports.iter().map(|r| r.checks).sum();
    Outcome::new(failed == 0, format!("{failed} of 100 random runs failed; {checks} events checked"))
}

fn cross_engine() -> Outcome {
    let (rate, t, n) = (0.5, 50.0, 1000u64);
    let particle = median_walk_ensemble(&ParticleConfig::heaviside(0), rate, t, n, 11).expect("particle runs");
    let xi0 = Interface::cone(Vertex::ORIGIN);
    let interface: Vec<(i64, i64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let seed = 50_000 + k;
            let paths = standard_paths(xi0.vertex(), &KillingClocks::new(seed, rate), 1.0, t);
            let eta = evolve_with_vertex_path(&xi0, &paths.exact, &ArrowStream::new(seed), t).to_particles();
            (eta.span(), eta.median_floor() + 1)
        })
        .collect();
    let width_a: Vec<i64> = particle.iter().map(|s| s.final_width).collect();
    let width_b: Vec<i64> = interface.iter().map(|s| s.0).collect();
    let med_a: Vec<i64> = particle.iter().map(|s| s.displacement).collect();
    let med_b: Vec<i64> = interface.iter().map(|s| s.1).collect();
    let w = chi_square_homogeneity(&width_a, &width_b);
    let m = chi_square_homogeneity(&med_a, &med_b);
    Outcome::new(
        w.p_value >= 0.01 && m.p_value >= 0.01,
        format!("width p = {:.3} ({} dof), median displacement p = {:.3} ({} dof); reject below 0.01", w.p_value, w.dof, m.p_value, m.dof),
    )
}

fn stationary_interface() -> MacroInterface {
    MacroInterface::stationary(1.0, 1e-3).expect("stationary profile")
}

fn barrier_gap() -> Outcome {
    let j = 1.0;
    let ladder = barrier_ladder(&stationary_interface(), j, 1.0, 0.1, 3, 1e-10).expect("ladder");
    let mut pass = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for l in &ladder.levels {
        let ok = l.max_sup_gap <= j * l.delta + 5e-3 && l.nesting_excess <= 1e-6;
        pass &= ok;
        parts.push(format!("δ={}: sup gap {:.4} (bound {:.4}), nesting {:.1e}", l.delta, l.max_sup_gap, j * l.delta + 5e-3, l.nesting_excess));
        notes.push(format!(
            "δ={}: sup gap / (2jδ) = {:.4}; mass gap {:.4} <= jδ: {}",
            l.delta,
            l.max_sup_gap / (2.0 * j * l.delta),
            l.max_mass_gap,
            l.max_mass_gap <= j * l.delta + 1e-9
        ));
    }
    let mut out = Outcome::new(pass, parts.join("; "));
    out.notes = notes;
    out.note("barrier cones differ by one block of growth, 2jδ, so the sup gap is 2jδ; the mass gap is the quantity bounded by jδ")
}

fn stationarity() -> Outcome {
    let rho = MacroDensity::stationary(1.0, 1e-3).expect("stationary density");
    let opts = EvolveOptions::default();
    let run = |delta: f64| {
        let tr = delta_evolve(&rho, 1.0, delta, 1.0, Barrier::Lower, &opts).expect("delta evolution");
        let last = tr.frames.last().expect("frames");
        let before = last.before.as_ref().expect("block end").sup_distance(&rho);
        (last.profile.sup_distance(&rho), before, last.profile.sup_interval_distance(&rho))
    };
    let (d1, b1, i1) = run(0.01);
    let (d2, b2, i2) = run(0.005);
    let ratio = d2 / d1;
    let pass = d1 <= 0.03 && (0.4..=0.6).contains(&ratio);
    Outcome::new(pass, format!("δ=0.01: sup distance {d1:.4} (bound 0.03); halving δ gives ratio {ratio:.3} (proportional: 0.5 ± 0.1)"))
        .note(format!("before the last removal: {b1:.4} at δ=0.01, {b2:.4} at δ=0.005"))
        .note(format!(
            "interval distance sup_(a<b)|∫(ρ_T - ρ̄)|: {i1:.5} at δ=0.01, {i2:.5} at δ=0.005 (ratio {:.3}, bound 2jδ)",
            i2 / i1
        ))
}

fn cone_and_rate_monotonicity() -> Outcome {
    let phi = stationary_interface();
    let ladder = barrier_ladder(&phi, 1.0, 1.0, 0.1, 3, 1e-10).expect("ladder");
    let pair = ladder.pairs.last().expect("levels");
    let mut worst = f64::INFINITY;
    for f in &pair.lower.frames {
        if let Ok(est) = estimate_at(&ladder, f.t) {
            worst = worst.min(cone_margin(&est, 1.0, f.t));
        }
    }
    let cmp = j_monotonicity_check(&phi, 0.5, 1.0, 0.025, 1.0, 1e-10, 1e-9).expect("rate comparison");
    let cone_ok = worst >= -1e-9;
    Outcome::new(
        cone_ok && cmp.shifted_holds,
        format!(
            "cone margin min(φ_t - |r| - jt) = {worst:.3e} ({}); rate inequality margin {:.4} over {} points ({})",
            if cone_ok { "holds" } else { "fails" },
            cmp.shifted_margin,
            cmp.points,
            if cmp.shifted_holds { "holds" } else { "fails" }
        ),
    )
    .note(format!(
        "with the cone growth 2jt that the profiles carry, the rate comparison margin is {:.3e} ({})",
        cmp.normalized_margin,
        if cmp.normalized_holds { "holds" } else { "fails" }
    ))
}

fn harness_wave_and_gap() -> Outcome {
    let rate = 0.05;
    let wave = traveling_wave(rate).expect("wave");
    let k = harness_evolve(&wave, rate, 100).expect("harness");
    let (a, b) = k.difference_range(&wave.lifted(2.0 * rate * 100.0));
    let dev = a.abs().max(b.abs());
    let mut worst_excess = f64::NEG_INFINITY;
    for (k0, block) in [(wave.clone(), 5u64), (wave.clone(), 10), (HarnessState::cone(0.0), 4), (HarnessState::cone(0.0), 20)] {
        let r = delta_harness_sandwich(&k0, rate, block, 200).expect("sandwich holds");
        worst_excess = worst_excess.max(r.max_gap - 2.0 * rate * block as f64);
    }
    Outcome::new(
        dev <= 1e-12 && worst_excess <= 1e-12,
        format!("sup|K_100 - (K̄ + 2Jn)| = {dev:.2e} (bound 1e-12); max(gap - 2Jδ) = {worst_excess:.2e}"),
    )
}

fn hydro_convergence() -> Outcome {
    let cfg = ExperimentConfig::default();
    let r = run_hydro_experiment(&cfg).expect("hydro experiment");
    let finest = r.points.last().expect("scales");
    let threshold_ok = finest.interface_median <= 0.05;
    let violations = r.sandwich_violations();
    let pass = r.density_decreasing && r.interface_decreasing && r.harness_decreasing && threshold_ok && violations == 0;
    let mut out = Outcome::new(
        pass,
        format!(
            "decreasing: density {}, interface {}, harness {}; interface statistic at ε=1/200 {:.4} (bound 0.05); sandwich violations {violations}",
            r.density_decreasing, r.interface_decreasing, r.harness_decreasing, finest.interface_median
        ),
    );
    for p in &r.points {
        out.notes.push(format!(
            "ε={}: density {:.4}, interface {:.4}, harness {:.4}, good-set fraction {:.2}, vertex spread sqrt(2εjt) = {:.4}",
            p.eps,
            p.density_median,
            p.interface_median,
            p.harness_distance,
            p.good_fraction,
            (2.0 * p.eps * cfg.physical.j * cfg.physical.t).sqrt()
        ));
    }
    for c in &r.certificates {
        out.notes.push(format!("barrier δ={}: mass gap {:.4} <= jδ: {}", c.delta, c.max_mass_gap, c.mass_within));
    }
    out
}

fn drift_identity() -> Outcome {
    let cases = [(ParticleConfig::heaviside(1), 1.0), (ParticleConfig::step_with_particles(-1, &[2]), 1.0)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (eta, rate)) in cases.iter().enumerate() {
        let exact = psi_drift_exact(eta, *rate);
        let est = drift_check_psi(eta, *rate, 0.01, 10_000, 300 + i as u64).expect("drift run");
        let z = est.z_score(exact);
        pass &= z.abs() <= 3.0;
        parts.push(format!("{eta}: {:.3} ± {:.3} vs {exact} (z = {z:.2})", est.value, est.std_error));
    }
    Outcome::new(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("invariant width", invariant_width),
        ("median random walk", median_walk),
        ("pathwise sandwich and rate ordering", sandwich_and_rate_ordering),
        ("height identity", height_identity),
        ("cross-engine oracle", cross_engine),
        ("barrier gap and nesting", barrier_gap),
        ("stationarity", stationarity),
        ("cone bound and rate monotonicity", cone_and_rate_monotonicity),
        ("harness traveling wave and delta gap", harness_wave_and_gap),
        ("hydrodynamic convergence", hydro_convergence),
        ("drift identity", drift_identity),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {} [{:.1}s]", i + 1, out.summary, start.elapsed().as_secs_f64());
        for n in &out.notes {
            println!("    {n}");
        }
        if !out.pass {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} passed, {} failed {:?}", criteria.len() - failed.len(), failed.len(), failed);
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
