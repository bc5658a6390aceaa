use lattice_core::rng::{self, role};
use lattice_core::ParticleConfig;
use macro_evolution::MacroDensity;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// Cumulative rounding of the mass to the right.
    Deterministic,
    /// Independent sites with the cell-averaged density.
    Bernoulli,
}

/// Mass of `ρ` to the right of `εx`, in particles.
fn particles_right(rho: &MacroDensity, eps: f64, x: i64) -> f64 {
    rho.mass_right(eps * x as f64) / eps
}

/// Site range `[lo, hi]` outside of which `ρ` is exactly 1 on the left and 0 on the right.
fn site_range(rho: &MacroDensity, eps: f64) -> (i64, i64) {
    let (a, b) = rho.window();
    ((a / eps).floor() as i64 - 1, (b / eps).ceil() as i64 + 1)
}

/// Microscopic configuration at scale `ε` with density profile `ρ`.
///
/// The deterministic mode puts `round(C(x)) - round(C(x+1))` particles at `x`
/// where `C(x) = F(εx)/ε`; it has median `-1/2` whenever `ρ` has median 0, and
/// every interval's particle count is within one of `∫ρ / ε`.
pub fn sample_micro_from_macro(rho: &MacroDensity, eps: f64, mode: SampleMode, seed: u64) -> ParticleConfig {
    assert!(eps > 0.0, "scale must be positive");
    let (lo, hi) = site_range(rho, eps);
    let bits: Vec<bool> = match mode {
        SampleMode::Deterministic => {
            let rounded: Vec<f64> = (lo..=hi + 1).map(|x| particles_right(rho, eps, x).round()).collect();
            rounded.windows(2).map(|w| w[0] - w[1] > 0.5).collect()
        }
        SampleMode::Bernoulli => {
            let mut g = rng::keyed(&[seed, role::SAMPLER, eps.to_bits()]);
            (lo..=hi)
                .map(|x| {
                    let p = particles_right(rho, eps, x) - particles_right(rho, eps, x + 1);
                    g.gen::<f64>() < p
                })
                .collect()
        }
    };
    // left of lo everything is occupied and right of hi everything is empty,
    // so the result is already a finite perturbation of a step
    ParticleConfig::from_window(lo, &bits)
}

/// Block averages over the partition of ℤ into `[kℓ, (k+1)ℓ - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockAverages {
    pub ell: i64,
    pub first_block: i64,
    pub values: Vec<f64>,
}

impl BlockAverages {
    pub fn block_of(&self, x: i64) -> i64 {
        x.div_euclid(self.ell)
    }

    /// Average on block `k`, with the constant tails outside the stored range.
    pub fn get(&self, k: i64) -> f64 {
        if k < self.first_block {
            1.0
        } else {
            self.values.get((k - self.first_block) as usize).copied().unwrap_or(0.0)
        }
    }
}

pub fn block_average(eta: &ParticleConfig, ell: i64) -> BlockAverages {
    assert!(ell >= 1, "block length must be at least one");
    let (l, r) = eta.boundaries();
    let first = l.min(r).div_euclid(ell);
    let last = l.max(r).div_euclid(ell);
    let values = (first..=last)
        .map(|k| (k * ell..(k + 1) * ell).filter(|&x| eta.get(x)).count() as f64 / ell as f64)
        .collect();
    BlockAverages { ell, first_block: first, values }
}

/// `(1/(εℓ)) ∫` of `ρ` over the image of block `k`.
pub fn macro_block_average(rho: &MacroDensity, eps: f64, ell: i64, k: i64) -> f64 {
    (particles_right(rho, eps, k * ell) - particles_right(rho, eps, (k + 1) * ell)) / ell as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodSetReport {
    pub good: bool,
    pub ell: i64,
    pub threshold: f64,
    /// `|ε L(η) - L(ρ)| + |ε R(η) - R(ρ)|`.
    pub boundary_error: f64,
    /// Block index and discrepancy of the worst block outside the two boundary blocks.
    pub worst_block: Option<(i64, f64)>,
}

/// Whether `η` recognizes `ρ` at scale `ε` with accuracy `ε^α` and blocks of
/// length `⌊ε^{-β}⌋`. The blocks spanning each pair of boundaries are left out.
pub fn good_set_check(eta: &ParticleConfig, rho: &MacroDensity, eps: f64, alpha: f64, beta: f64) -> GoodSetReport {
    assert!(0.0 < alpha && alpha < beta && beta < 1.0, "need 0 < α < β < 1");
    let ell = (eps.powf(-beta).floor() as i64).max(1);
    let threshold = eps.powf(alpha);
    let (le, re) = eta.boundaries();
    let (lr, rr) = rho.window();
    let boundary_error = (eps * le as f64 - lr).abs() + (eps * re as f64 - rr).abs();

    let block_of_real = |y: f64| (y / ell as f64).floor() as i64;
    let span = |micro: i64, scaled: f64| {
        let (a, b) = (micro.div_euclid(ell), block_of_real(scaled / eps));
        (a.min(b), a.max(b))
    };
    let left_excl = span(le, lr);
    let right_excl = span(re, rr);
    let excluded = |k: i64| (left_excl.0..=left_excl.1).contains(&k) || (right_excl.0..=right_excl.1).contains(&k);

    let micro = block_average(eta, ell);
    let lo = left_excl.0.min(right_excl.0).min(micro.first_block) - 1;
    let hi = left_excl.1.max(right_excl.1).max(micro.first_block + micro.values.len() as i64) + 1;
    let mut worst: Option<(i64, f64)> = None;
    for k in (lo..=hi).filter(|&k| !excluded(k)) {
        let d = (micro.get(k) - macro_block_average(rho, eps, ell, k)).abs();
        if worst.is_none_or(|(_, w)| d > w) {
            worst = Some((k, d));
        }
    }
    let blocks_ok = worst.is_none_or(|(_, d)| d <= threshold);
    GoodSetReport { good: boundary_error <= threshold && blocks_ok, ell, threshold, boundary_error, worst_block: worst }
}
