use std::io::Write;

use lattice_core::ParticleConfig;
use serde::Serialize;

use crate::process::{Event, EventKind, ParticleProcess};
use crate::SimError;

/// Event log of one run plus enough context to rebuild any snapshot.
#[derive(Clone, Debug)]
pub struct ParticleTrajectory {
    pub initial: ParticleConfig,
    pub final_config: ParticleConfig,
    pub rate: f64,
    pub horizon: f64,
    pub seed: u64,
    pub centered: bool,
    pub events: Vec<Event>,
    pub births: u64,
    pub deaths: u64,
    /// Events at which `M_t = M_0 + A_t - B_t` failed (uncentered runs only).
    pub median_violations: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySummary {
    pub seed: u64,
    pub rate: f64,
    pub horizon: f64,
    pub centered: bool,
    pub initial: String,
    pub final_config: String,
    pub events: usize,
    pub births: u64,
    pub deaths: u64,
    pub median_displacement: f64,
    pub final_width: i64,
    pub median_violations: u64,
}

fn run(mut p: ParticleProcess, horizon: f64, seed: u64) -> Result<ParticleTrajectory, SimError> {
    let initial = p.config().clone();
    let m0 = initial.median_floor();
    let centered = p.is_centered();
    let mut events = Vec::new();
    let mut violations = 0u64;
    let (mut a, mut b) = (0i64, 0i64);
    p.run_until(horizon, |e, c, _| {
        match e.kind {
            EventKind::Birth => a += 1,
            EventKind::Death => b += 1,
            EventKind::Exchange => {}
        }
        if !centered && c.median_floor() != m0 + a - b {
            violations += 1;
        }
        events.push(*e);
    })?;
    Ok(ParticleTrajectory {
        initial,
        final_config: p.config().clone(),
        rate: 0.0,
        horizon,
        seed,
        centered,
        events,
        births: p.births(),
        deaths: p.deaths(),
        median_violations: violations,
    })
}

/// Exact-event simulation of the free-boundary exclusion process on `[0, horizon]`.
pub fn simulate_particle(eta0: &ParticleConfig, rate: f64, horizon: f64, seed: u64) -> Result<ParticleTrajectory, SimError> {
    simulate_particle_replica(eta0, rate, horizon, seed, 0)
}

pub fn simulate_particle_replica(
    eta0: &ParticleConfig,
    rate: f64,
    horizon: f64,
    seed: u64,
    replica: u64,
) -> Result<ParticleTrajectory, SimError> {
    if !(horizon >= 0.0) {
        return Err(SimError::BadHorizon(horizon));
    }
    let p = ParticleProcess::new(eta0.clone(), rate, seed, replica)?;
    let mut t = run(p, horizon, seed)?;
    t.rate = rate;
    Ok(t)
}

/// The same dynamics seen from the median; `eta0` must have median ½.
pub fn simulate_centered(eta0: &ParticleConfig, rate: f64, horizon: f64, seed: u64) -> Result<ParticleTrajectory, SimError> {
    if !(horizon >= 0.0) {
        return Err(SimError::BadHorizon(horizon));
    }
    let p = ParticleProcess::centered(eta0.clone(), rate, seed, 0)?;
    let mut t = run(p, horizon, seed)?;
    t.rate = rate;
    Ok(t)
}

impl ParticleTrajectory {
    fn apply(&self, c: &mut ParticleConfig, e: &Event) {
        match e.kind {
            EventKind::Exchange => c.exchange(e.site),
            EventKind::Birth => {
                c.birth();
                if self.centered {
                    c.shift_in_place(-1);
                }
            }
            EventKind::Death => {
                c.death();
                if self.centered {
                    c.shift_in_place(1);
                }
            }
        }
    }

    /// Configuration at time `t` (right-continuous), rebuilt from the log.
    pub fn config_at(&self, t: f64) -> ParticleConfig {
        let mut c = self.initial.clone();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            self.apply(&mut c, e);
        }
        c
    }

    /// Snapshots at the requested times, rebuilt in a single replay.
    pub fn snapshots(&self, times: &[f64]) -> Vec<(f64, ParticleConfig)> {
        let mut sorted: Vec<f64> = times.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut c = self.initial.clone();
        let mut it = self.events.iter().peekable();
        let mut out = Vec::with_capacity(sorted.len());
        for t in sorted {
            while let Some(e) = it.peek() {
                if e.time > t {
                    break;
                }
                self.apply(&mut c, e);
                it.next();
            }
            out.push((t, c.clone()));
        }
        out
    }

    pub fn summary(&self) -> TrajectorySummary {
        TrajectorySummary {
            seed: self.seed,
            rate: self.rate,
            horizon: self.horizon,
            centered: self.centered,
            initial: self.initial.to_string(),
            final_config: self.final_config.to_string(),
            events: self.events.len(),
            births: self.births,
            deaths: self.deaths,
            median_displacement: self.final_config.median() - self.initial.median(),
            final_width: self.final_config.span(),
            median_violations: self.median_violations,
        }
    }

    /// One row per event: `time,event_type,L,R,median,A,B,width`, preceded by the initial state.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SimError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "event_type", "L", "R", "median", "A", "B", "width"])?;
        let mut c = self.initial.clone();
        let (mut a, mut b) = (0u64, 0u64);
        let row = |w: &mut csv::Writer<W>, t: f64, kind: &str, c: &ParticleConfig, a: u64, b: u64| {
            let (l, r) = c.boundaries();
            w.write_record([
                t.to_string(),
                kind.to_string(),
                l.to_string(),
                r.to_string(),
                c.median().to_string(),
                a.to_string(),
                b.to_string(),
                c.span().to_string(),
            ])
        };
        row(&mut w, 0.0, "initial", &c, a, b)?;
        for e in &self.events {
            self.apply(&mut c, e);
            match e.kind {
                EventKind::Birth => a += 1,
                EventKind::Death => b += 1,
                EventKind::Exchange => {}
            }
            row(&mut w, e.time, e.kind.as_str(), &c, a, b)?;
        }
        w.flush()?;
        Ok(())
    }
}
