use lattice_core::ParticleConfig;
use rayon::prelude::*;
use serde::Serialize;

use crate::process::{EventKind, ParticleProcess};
use crate::SimError;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Distance to `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target) / self.std_error
    }
}

fn mean_and_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Estimate { value: mean, std_error: (var / n).sqrt() }
}

/// Number of batches used by [`estimate_invariant_width`].
pub const WIDTH_BATCHES: usize = 50;

/// Time average of `R - L + 1` under the centered dynamics started from the
/// step `1{x <= 0}`, after a burn-in. The standard error comes from batch means.
pub fn estimate_invariant_width(rate: f64, burn: f64, window: f64, seed: u64) -> Result<Estimate, SimError> {
    if !(burn > 0.0 && window > 0.0) {
        return Err(SimError::BadHorizon(burn.min(window)));
    }
    let mut p = ParticleProcess::centered(ParticleConfig::heaviside(1), rate, seed, 0)?;
    p.run_until(burn, |_, _, _| {})?;
    let batch_len = window / WIDTH_BATCHES as f64;
    let mut batches = Vec::with_capacity(WIDTH_BATCHES);
    for k in 1..=WIDTH_BATCHES {
        let end = burn + batch_len * k as f64;
        let mut width = p.config().span() as f64;
        let mut area = 0.0;
        let tail = p.run_until(end, |_, c, held| {
            area += width * held;
            width = c.span() as f64;
        })?;
        area += width * tail;
        batches.push(area / batch_len);
    }
    Ok(mean_and_se(&batches))
}

/// Monte Carlo estimate of `(E ψ(η_dt) - ψ(η)) / dt`, the generator applied to `ψ`.
pub fn drift_check_psi(eta: &ParticleConfig, rate: f64, dt: f64, replicas: u64, seed: u64) -> Result<Estimate, SimError> {
    let psi0 = eta.psi() as f64;
    let diffs: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let mut p = ParticleProcess::new(eta.clone(), rate, seed, k)?;
            p.run_until(dt, |_, _, _| {})?;
            Ok((p.config().psi() as f64 - psi0) / dt)
        })
        .collect::<Result<_, SimError>>()?;
    Ok(mean_and_se(&diffs))
}

/// Exact value of the generator on `ψ`: `1/2 - J (R - L + 1)`.
pub fn psi_drift_exact(eta: &ParticleConfig, rate: f64) -> f64 {
    0.5 - rate * eta.span() as f64
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MedianWalkSample {
    pub displacement: i64,
    pub births: u64,
    pub deaths: u64,
    pub final_width: i64,
    pub violations: u64,
}

/// Independent replicas from `eta`, recording the median displacement and
/// checking `M_t = M_0 + A_t - B_t` after every event.
pub fn median_walk_ensemble(
    eta: &ParticleConfig,
    rate: f64,
    horizon: f64,
    replicas: u64,
    seed: u64,
) -> Result<Vec<MedianWalkSample>, SimError> {
    let m0 = eta.median_floor();
    (0..replicas)
        .into_par_iter()
        .map(|k| {
            let mut p = ParticleProcess::new(eta.clone(), rate, seed, k)?;
            let (mut a, mut b, mut bad) = (0i64, 0i64, 0u64);
            p.run_until(horizon, |e, c, _| {
                match e.kind {
                    EventKind::Birth => a += 1,
                    EventKind::Death => b += 1,
                    EventKind::Exchange => {}
                }
                if c.median_floor() != m0 + a - b {
                    bad += 1;
                }
            })?;
            Ok(MedianWalkSample {
                displacement: p.config().median_floor() - m0,
                births: p.births(),
                deaths: p.deaths(),
                final_width: p.config().span(),
                violations: bad,
            })
        })
        .collect()
}
