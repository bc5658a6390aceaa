use serde::Serialize;

use crate::density::{GridSpec, MacroDensity};
use crate::evolve::{delta_interface_evolve, Barrier, EvolveOptions, InterfaceTrajectory};
use crate::interface::MacroInterface;
use crate::MacroError;

/// Distances between the two barriers at one block end.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapStat {
    pub t: f64,
    /// `sup_r (upper - lower)`.
    pub sup_gap: f64,
    /// `inf_r (upper - lower)`; negative values mean the order broke.
    pub inf_gap: f64,
    /// `sup_r |F_upper - F_lower|`, the gap in mass to the right of `r`.
    pub mass_gap: f64,
    /// `sup_{a<b} |∫_a^b (ρ_upper - ρ_lower)|`.
    pub interval_gap: f64,
}

/// Lower and upper delta barriers from the same initial interface.
#[derive(Clone, Debug)]
pub struct BarrierPair {
    pub j: f64,
    pub delta: f64,
    pub lower: InterfaceTrajectory,
    pub upper: InterfaceTrajectory,
    pub gaps: Vec<GapStat>,
}

/// `sup_{a<b} |∫_a^b (ρ - σ)|` for the densities of two interfaces, which is
/// half the oscillation of their difference.
pub fn interval_distance(a: &MacroInterface, b: &MacroInterface) -> f64 {
    let (lo, hi) = a.difference_range(b);
    0.5 * (hi - lo)
}

/// `sup_r |F(r; ρ_a) - F(r; ρ_b)|`, with `F = (φ - r - c) / 2`.
pub fn mass_distance(a: &MacroInterface, b: &MacroInterface) -> f64 {
    let dc = a.offset() - b.offset();
    let (lo, hi) = a.difference_range(b);
    0.5 * (hi - dc).abs().max((lo - dc).abs())
}

fn gap(t: f64, lower: &MacroInterface, upper: &MacroInterface) -> GapStat {
    let (inf_gap, sup_gap) = upper.difference_range(lower);
    GapStat { t, sup_gap, inf_gap, mass_gap: mass_distance(upper, lower), interval_gap: interval_distance(upper, lower) }
}

pub fn barrier_pair(phi0: &MacroInterface, j: f64, delta: f64, horizon: f64, tail_tol: f64) -> Result<BarrierPair, MacroError> {
    let opts = EvolveOptions { tail_tol, ..EvolveOptions::default() };
    let lower = delta_interface_evolve(phi0, j, delta, horizon, Barrier::Lower, &opts)?;
    let upper = delta_interface_evolve(phi0, j, delta, horizon, Barrier::Upper, &opts)?;
    let gaps = lower.frames.iter().zip(&upper.frames).map(|(a, b)| gap(a.t, &a.profile, &b.profile)).collect();
    Ok(BarrierPair { j, delta, lower, upper, gaps })
}

impl BarrierPair {
    pub fn max_sup_gap(&self) -> f64 {
        self.gaps.iter().map(|g| g.sup_gap).fold(0.0, f64::max)
    }

    pub fn max_mass_gap(&self) -> f64 {
        self.gaps.iter().map(|g| g.mass_gap).fold(0.0, f64::max)
    }

    /// Most negative `upper - lower` seen, or 0.
    pub fn order_defect(&self) -> f64 {
        self.gaps.iter().map(|g| (-g.inf_gap).max(0.0)).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub delta: f64,
    pub gaps: Vec<GapStat>,
    pub max_sup_gap: f64,
    pub max_mass_gap: f64,
    /// `max (coarse lower - fine lower, fine upper - coarse upper)` against
    /// the previous level, over the common block ends; 0 for the first level.
    pub nesting_excess: f64,
}

/// Barriers at `δ_n = δ₀ 2^{-n}`, their nesting, and the midpoint estimate at the horizon.
#[derive(Clone, Debug)]
pub struct BarrierLimit {
    pub j: f64,
    pub horizon: f64,
    pub estimate: MacroInterface,
    pub lower: MacroInterface,
    pub upper: MacroInterface,
    pub levels: Vec<LevelReport>,
    pub pairs: Vec<BarrierPair>,
}

impl BarrierLimit {
    pub fn nesting_excess(&self) -> f64 {
        self.levels.iter().map(|l| l.nesting_excess).fold(0.0, f64::max)
    }

    /// `sup (upper - lower)` at the horizon on the finest level.
    pub fn certificate(&self) -> f64 {
        self.upper.difference_range(&self.lower).1
    }

    pub fn summary(&self) -> BarrierSummary {
        BarrierSummary {
            j: self.j,
            horizon: self.horizon,
            certificate: self.certificate(),
            nesting_excess: self.nesting_excess(),
            estimate_at_origin: self.estimate.eval(0.0),
            levels: self.levels.clone(),
        }
    }
}

/// JSON-friendly digest of a [`BarrierLimit`].
#[derive(Clone, Debug, Serialize)]
pub struct BarrierSummary {
    pub j: f64,
    pub horizon: f64,
    pub certificate: f64,
    pub nesting_excess: f64,
    pub estimate_at_origin: f64,
    pub levels: Vec<LevelReport>,
}

fn nesting_excess(coarse: &BarrierPair, fine: &BarrierPair) -> f64 {
    let mut worst = 0.0f64;
    for (g, (lo, up)) in coarse.gaps.iter().zip(coarse.lower.frames.iter().zip(&coarse.upper.frames)) {
        let (Some(flo), Some(fup)) = (fine.lower.at(g.t), fine.upper.at(g.t)) else { continue };
        worst = worst.max(lo.profile.difference_range(flo).1);
        worst = worst.max(fup.difference_range(&up.profile).1);
    }
    worst
}

/// Computes all levels without judging them.
pub fn barrier_ladder(phi0: &MacroInterface, j: f64, horizon: f64, delta0: f64, levels: usize, tail_tol: f64) -> Result<BarrierLimit, MacroError> {
    if levels < 2 {
        return Err(MacroError::BadParameter(format!("need at least two levels, got {levels}")));
    }
    let mut pairs: Vec<BarrierPair> = Vec::with_capacity(levels);
    let mut reports = Vec::with_capacity(levels);
    for n in 0..levels {
        let delta = delta0 / (1u64 << n) as f64;
        let pair = barrier_pair(phi0, j, delta, horizon, tail_tol)?;
        let nesting = pairs.last().map(|prev| nesting_excess(prev, &pair)).unwrap_or(0.0).max(pair.order_defect());
        reports.push(LevelReport {
            delta,
            gaps: pair.gaps.clone(),
            max_sup_gap: pair.max_sup_gap(),
            max_mass_gap: pair.max_mass_gap(),
            nesting_excess: nesting,
        });
        pairs.push(pair);
    }
    let finest = pairs.last().expect("at least two levels");
    let lower = finest.lower.last().clone();
    let upper = finest.upper.last().clone();
    let estimate = lower.midpoint(&upper);
    Ok(BarrierLimit { j, horizon, estimate, lower, upper, levels: reports, pairs })
}

/// [`barrier_ladder`], failing when the nesting breaks by more than `nesting_tol`.
pub fn barrier_limit(
    phi0: &MacroInterface,
    j: f64,
    horizon: f64,
    delta0: f64,
    levels: usize,
    tail_tol: f64,
    nesting_tol: f64,
) -> Result<BarrierLimit, MacroError> {
    let out = barrier_ladder(phi0, j, horizon, delta0, levels, tail_tol)?;
    for w in out.levels.windows(2) {
        if w[1].nesting_excess > nesting_tol {
            return Err(MacroError::Nesting { coarse: w[0].delta, fine: w[1].delta, excess: w[1].nesting_excess });
        }
    }
    Ok(out)
}

/// The explicit stationary pair for rate `j`.
pub fn stationary_profile(j: f64, grid: &GridSpec) -> Result<(MacroDensity, MacroInterface), MacroError> {
    Ok((MacroDensity::stationary(j, grid.h)?, MacroInterface::stationary(j, grid.h)?))
}

/// Margins of the rate comparison between the lower barriers at `j <= j'`.
#[derive(Clone, Debug, Serialize)]
pub struct RateComparison {
    pub j: f64,
    pub j_prime: f64,
    pub points: usize,
    /// `min (φ^{(j)}_t - j t) - (φ^{(j')}_t - j' t)` over sampled `(r, t)`.
    pub shifted_margin: f64,
    /// The same with the cone growth `2jt` that the profiles actually carry.
    pub normalized_margin: f64,
    pub shifted_holds: bool,
    pub normalized_holds: bool,
}

pub fn j_monotonicity_check(
    phi0: &MacroInterface,
    j: f64,
    j_prime: f64,
    delta: f64,
    horizon: f64,
    tail_tol: f64,
    tol: f64,
) -> Result<RateComparison, MacroError> {
    if !(j <= j_prime) {
        return Err(MacroError::BadParameter(format!("need j <= j', got {j} and {j_prime}")));
    }
    let opts = EvolveOptions { tail_tol, ..EvolveOptions::default() };
    let a = delta_interface_evolve(phi0, j, delta, horizon, Barrier::Lower, &opts)?;
    let b = delta_interface_evolve(phi0, j_prime, delta, horizon, Barrier::Lower, &opts)?;
    let mut shifted = f64::INFINITY;
    let mut normalized = f64::INFINITY;
    let mut points = 0;
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        let t = fa.t;
        let (lo, _) = fa.profile.difference_range(&fb.profile);
        let (r0, r1) = fa.profile.node_range();
        let (s0, s1) = fb.profile.node_range();
        points += (r1.max(s1) - r0.min(s0) + 1) as usize + 1;
        shifted = shifted.min(lo - j * t + j_prime * t);
        normalized = normalized.min(lo - 2.0 * j * t + 2.0 * j_prime * t);
    }
    Ok(RateComparison {
        j,
        j_prime,
        points,
        shifted_margin: shifted,
        normalized_margin: normalized,
        shifted_holds: shifted >= -tol,
        normalized_holds: normalized >= -tol,
    })
}

/// `min_r (φ(r) - |r| - jt)`; nonnegative when the profile sits above the
/// cone rising at speed `j`.
pub fn cone_margin(phi: &MacroInterface, j: f64, t: f64) -> f64 {
    phi.min_above_abs() - j * t
}

/// `max sup_r |φ_t - φ_s| / √|t - s|` over all recorded pairs.
pub fn holder_constant(frames: &[(f64, &MacroInterface)]) -> f64 {
    let mut worst = 0.0f64;
    for (i, (t, a)) in frames.iter().enumerate() {
        for (s, b) in &frames[i + 1..] {
            let dt = (t - s).abs();
            if dt > 0.0 {
                worst = worst.max(a.sup_distance(b) / dt.sqrt());
            }
        }
    }
    worst
}
