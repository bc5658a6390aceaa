use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::sampling::SampleMode;
use crate::ExperimentError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physical {
    /// Macroscopic killing rate.
    pub j: f64,
    /// Coarsest block length of the barrier ladder.
    pub delta: f64,
    /// Scales, strictly decreasing.
    pub eps: Vec<f64>,
    /// Horizon.
    pub t: f64,
    /// Extra comparison times; each must be a multiple of the finest block length.
    pub times: Vec<f64>,
    /// Microscopic rates swept by the invariant-width experiment.
    pub rates: Vec<f64>,
    /// Rate of the stationary profile used as initial datum; defaults to `j`.
    pub profile_j: Option<f64>,
}

impl Default for Physical {
    fn default() -> Self {
        Self { j: 1.0, delta: 0.1, eps: vec![0.02, 0.01, 0.005], t: 0.5, times: Vec::new(), rates: vec![0.25, 0.5, 1.0], profile_j: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerical {
    pub h: f64,
    pub tail_tol: f64,
    pub nesting_tol: f64,
    /// Number of halvings of `delta` in the barrier ladder, counting the first.
    pub levels: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sampler: SampleMode,
}

impl Default for Numerical {
    fn default() -> Self {
        Self { h: 1e-3, tail_tol: 1e-10, nesting_tol: 1e-6, levels: 3, alpha: 0.25, beta: 0.5, sampler: SampleMode::Deterministic }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Statistical {
    pub replicas: u64,
    /// Burn-in, in units of `1/J`.
    pub burn: f64,
    /// Averaging window, in units of `1/J`.
    pub window: f64,
}

impl Default for Statistical {
    fn default() -> Self {
        Self { replicas: 20, burn: 1e4, window: 1e5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub physical: Physical,
    pub numerical: Numerical,
    pub statistical: Statistical,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "hydro".into(),
            seed: 1,
            output_dir: None,
            physical: Physical::default(),
            numerical: Numerical::default(),
            statistical: Statistical::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn profile_rate(&self) -> f64 {
        self.physical.profile_j.unwrap_or(self.physical.j)
    }

    pub fn finest_delta(&self) -> f64 {
        self.physical.delta / (1u64 << self.numerical.levels.saturating_sub(1)) as f64
    }

    /// Comparison times: the extra times followed by the horizon, sorted and deduplicated.
    pub fn sample_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.physical.times.iter().copied().chain([self.physical.t]).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ts
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let p = &self.physical;
        let n = &self.numerical;
        let s = &self.statistical;
        if !(p.j >= 0.0 && p.j.is_finite()) {
            return Err(bad(format!("j must be finite and nonnegative, got {}", p.j)));
        }
        if !(p.delta > 0.0 && p.t > 0.0) {
            return Err(bad(format!("delta and t must be positive, got {} and {}", p.delta, p.t)));
        }
        if p.eps.is_empty() || p.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(bad("eps must be a nonempty list of values in (0, 1)"));
        }
        if p.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("eps must be strictly decreasing"));
        }
        if !(self.profile_rate() > 0.0) {
            return Err(bad("the initial profile needs a positive rate; set profile_j when j = 0"));
        }
        if p.rates.iter().any(|&r| !(r > 0.0)) {
            return Err(bad("rates must be positive"));
        }
        if !(n.h > 0.0 && n.tail_tol > 0.0 && n.nesting_tol >= 0.0) {
            return Err(bad("h and tail_tol must be positive, nesting_tol nonnegative"));
        }
        if n.levels < 2 {
            return Err(bad("levels must be at least 2"));
        }
        if !(0.0 < n.alpha && n.alpha < n.beta && n.beta < 1.0) {
            return Err(bad(format!("need 0 < alpha < beta < 1, got {} and {}", n.alpha, n.beta)));
        }
        if s.replicas == 0 || !(s.burn > 0.0 && s.window > 0.0) {
            return Err(bad("replicas, burn and window must be positive"));
        }
        let d = self.finest_delta();
        for &t in &self.sample_times() {
            let k = t / d;
            if !(t > 0.0 && t <= p.t + 1e-12) || (k - k.round()).abs() > 1e-9 {
                return Err(bad(format!("time {t} must lie in (0, t] and be a multiple of the finest block {d}")));
            }
        }
        Ok(())
    }
}
