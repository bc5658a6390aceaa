use serde::{Deserialize, Serialize};

use crate::density::MacroDensity;
use crate::interface::MacroInterface;
use crate::kernel::HeatWeights;
use crate::MacroError;

/// Which of the two delta evolutions to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Barrier {
    /// Killings applied at the end of each block.
    Lower,
    /// Killings applied in advance, at the start of each block.
    Upper,
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub tail_tol: f64,
    /// Fail instead of falling back to the step when a removal finds no mass
    /// right of the origin.
    pub strict: bool,
    /// Extra output times strictly inside blocks.
    pub extra_times: Vec<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tail_tol: 1e-10, strict: false, extra_times: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct Frame<P> {
    pub t: f64,
    pub profile: P,
    /// At block ends, the profile before the removal or cone update.
    pub before: Option<P>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<P> {
    pub j: f64,
    pub delta: f64,
    pub barrier: Barrier,
    pub frames: Vec<Frame<P>>,
    /// Removals that found no mass right of the origin and returned the step.
    pub fallbacks: usize,
}

pub type DensityTrajectory = Trajectory<MacroDensity>;
pub type InterfaceTrajectory = Trajectory<MacroInterface>;

impl<P> Trajectory<P> {
    /// The last frame recorded at time `t`.
    pub fn at(&self, t: f64) -> Option<&P> {
        let tol = 1e-9 * self.delta.max(1.0);
        self.frames.iter().rev().find(|f| (f.t - t).abs() <= tol).map(|f| &f.profile)
    }

    pub fn last(&self) -> &P {
        &self.frames.last().expect("trajectories are never empty").profile
    }

    /// Frames at the block ends `kδ`, in order.
    pub fn block_frames(&self) -> impl Iterator<Item = &Frame<P>> {
        let delta = self.delta;
        self.frames.iter().filter(move |f| {
            let k = (f.t / delta).round();
            (f.t - k * delta).abs() <= 1e-9 * delta.max(1.0)
        })
    }
}

fn block_count(delta: f64, horizon: f64) -> Result<u64, MacroError> {
    if !(delta > 0.0) || !(horizon >= 0.0) {
        return Err(MacroError::BadParameter(format!("block length {delta}, horizon {horizon}")));
    }
    let k = (horizon / delta).round();
    if (k * delta - horizon).abs() > 1e-9 * horizon.max(1.0) {
        return Err(MacroError::BadParameter(format!("horizon {horizon} is not a multiple of the block length {delta}")));
    }
    Ok(k as u64)
}

fn check_rate(j: f64) -> Result<(), MacroError> {
    if !(j >= 0.0) || !j.is_finite() {
        return Err(MacroError::BadParameter(format!("rate {j} must be nonnegative")));
    }
    Ok(())
}

struct Remover {
    mass: f64,
    strict: bool,
    fallbacks: usize,
}

impl Remover {
    fn apply(&mut self, rho: &MacroDensity, t: f64) -> Result<MacroDensity, MacroError> {
        if self.mass == 0.0 {
            return Ok(rho.clone());
        }
        let (_, r) = rho.quantiles(self.mass)?;
        if r <= 0.0 {
            if self.strict {
                return Err(MacroError::QuantileFailure { mass: self.mass, t });
            }
            self.fallbacks += 1;
        }
        rho.gamma(self.mass)
    }
}

/// Alternates exact heat steps of length `δ` with removal of mass `jδ`.
pub fn delta_evolve(
    rho0: &MacroDensity,
    j: f64,
    delta: f64,
    horizon: f64,
    barrier: Barrier,
    opts: &EvolveOptions,
) -> Result<DensityTrajectory, MacroError> {
    check_rate(j)?;
    let blocks = block_count(delta, horizon)?;
    let weights = HeatWeights::new(rho0.h(), delta);
    let mut remover = Remover { mass: j * delta, strict: opts.strict, fallbacks: 0 };
    let mut frames = Vec::new();
    let mut rho = rho0.clone();
    if barrier == Barrier::Upper {
        let next = remover.apply(&rho, 0.0)?;
        frames.push(Frame { t: 0.0, profile: next.clone(), before: Some(rho) });
        rho = next;
    } else {
        frames.push(Frame { t: 0.0, profile: rho.clone(), before: None });
    }
    let mut extra = sorted_extra(&opts.extra_times, horizon);
    for k in 1..=blocks {
        let start = (k - 1) as f64 * delta;
        let end = k as f64 * delta;
        while let Some(&t) = extra.first() {
            if t >= end {
                break;
            }
            extra.remove(0);
            if t > start {
                frames.push(Frame { t, profile: rho.heat(t - start, opts.tail_tol), before: None });
            }
        }
        let heated = rho.heat_with(&weights, opts.tail_tol);
        rho = remover.apply(&heated, end)?;
        frames.push(Frame { t: end, profile: rho.clone(), before: Some(heated) });
    }
    Ok(Trajectory { j, delta, barrier, frames, fallbacks: remover.fallbacks })
}

fn sorted_extra(times: &[f64], horizon: f64) -> Vec<f64> {
    let mut v: Vec<f64> = times.iter().copied().filter(|t| *t > 0.0 && *t <= horizon).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// The same evolution on interfaces: heat steps, then a maximum with a cone
/// whose vertex rises by `2jδ` per block. The upper barrier uses the cone of
/// the end of each block from its start.
pub fn delta_interface_evolve(
    phi0: &MacroInterface,
    j: f64,
    delta: f64,
    horizon: f64,
    barrier: Barrier,
    opts: &EvolveOptions,
) -> Result<InterfaceTrajectory, MacroError> {
    check_rate(j)?;
    let blocks = block_count(delta, horizon)?;
    let weights = HeatWeights::new(phi0.h(), delta);
    let c0 = phi0.offset();
    let lead = if barrier == Barrier::Upper { 1 } else { 0 };
    let cone = |k: u64| c0 + 2.0 * j * delta * (k + lead) as f64;
    let mut frames = Vec::new();
    let mut phi = phi0.clone();
    let mut fallbacks = 0;
    let mut update = |heated: &MacroInterface, k: u64| {
        let next = heated.cone_max(cone(k));
        if j > 0.0 && next.nodes().is_empty() && !heated.nodes().is_empty() {
            fallbacks += 1;
        }
        next
    };
    if barrier == Barrier::Upper {
        let next = update(&phi, 0);
        frames.push(Frame { t: 0.0, profile: next.clone(), before: Some(phi) });
        phi = next;
    } else {
        frames.push(Frame { t: 0.0, profile: phi.clone(), before: None });
    }
    let mut extra = sorted_extra(&opts.extra_times, horizon);
    for k in 1..=blocks {
        let start = (k - 1) as f64 * delta;
        let end = k as f64 * delta;
        while let Some(&t) = extra.first() {
            if t >= end {
                break;
            }
            extra.remove(0);
            if t > start {
                frames.push(Frame { t, profile: phi.heat(t - start, opts.tail_tol), before: None });
            }
        }
        let heated = phi.heat_with(&weights, opts.tail_tol);
        phi = update(&heated, k);
        frames.push(Frame { t: end, profile: phi.clone(), before: Some(heated) });
    }
    Ok(Trajectory { j, delta, barrier, frames, fallbacks })
}
