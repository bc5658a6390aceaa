//! Continuous-time simulation of symmetric exclusion with a rate-`J` death
//! at the rightmost particle and a rate-`J` birth at the leftmost hole.

mod estimators;
mod process;
mod trajectory;

pub use estimators::{
    drift_check_psi, estimate_invariant_width, median_walk_ensemble, psi_drift_exact, Estimate, MedianWalkSample,
    WIDTH_BATCHES,
};
pub use process::{Event, EventKind, ParticleProcess, DEFAULT_EVENT_CAP};
pub use trajectory::{simulate_centered, simulate_particle, simulate_particle_replica, ParticleTrajectory, TrajectorySummary};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("rate must be positive and finite, got {0}")]
    BadRate(f64),
    #[error("time horizon must be nonnegative, got {0}")]
    BadHorizon(f64),
    #[error("centered dynamics need median 1/2, got {0}")]
    NotCentered(f64),
    #[error("event cap of {cap} reached at time {time}; parameters are likely pathological")]
    EventCap { cap: u64, time: f64 },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}
