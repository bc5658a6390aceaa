use macro_evolution::MacroInterface;

use crate::state::{harness_evolve, HarnessState};
use crate::HarnessError;

/// Upper bound on the number of averaging steps in one rescaled run.
pub const MAX_STEPS: f64 = 1e9;

/// A harness run at rate `εj` for `⌊t/ε²⌋` steps, read back as the step
/// function `r ↦ ε K(⌊r/ε⌋)`.
#[derive(Clone, Debug)]
pub struct RescaledHarness {
    pub eps: f64,
    pub rate: f64,
    pub t: f64,
    pub state: HarnessState,
}

pub fn rescaled_harness(phi0: &MacroInterface, j: f64, eps: f64, t: f64) -> Result<RescaledHarness, HarnessError> {
    if !(eps > 0.0) || !(t >= 0.0) || !(j >= 0.0) {
        return Err(HarnessError::BadParameter(format!("need ε > 0, t >= 0, j >= 0; got {eps}, {t}, {j}")));
    }
    let steps = (t / (eps * eps)).floor();
    if steps > MAX_STEPS {
        return Err(HarnessError::TooManySteps(steps));
    }
    let (a, b) = phi0.window();
    let lo = (a / eps).floor() as i64 - 1;
    let hi = (b / eps).ceil() as i64 + 1;
    let k0 = HarnessState::from_fn(lo, hi, phi0.offset() / eps, |x| phi0.eval(eps * x as f64) / eps)?;
    let rate = eps * j;
    let state = harness_evolve(&k0, rate, steps as u64)?;
    Ok(RescaledHarness { eps, rate, t, state })
}

impl RescaledHarness {
    pub fn eval(&self, r: f64) -> f64 {
        self.eps * self.state.get((r / self.eps).floor() as i64)
    }

    /// `sup_r |ε K(⌊r/ε⌋) - φ(r)|`, exact for a piecewise-linear `φ`: on each
    /// step the extremes sit at the step's ends or at nodes of `φ`.
    pub fn sup_distance(&self, phi: &MacroInterface) -> f64 {
        let eps = self.eps;
        let h = phi.h();
        let (s0, s1) = self.state.span();
        let (n0, n1) = phi.node_range();
        let lo = s0.min((n0 as f64 * h / eps).floor() as i64) - 1;
        let hi = s1.max((n1 as f64 * h / eps).ceil() as i64) + 1;
        let mut worst = 0.0f64;
        for x in lo..=hi {
            let level = eps * self.state.get(x);
            let (left, right) = (x as f64 * eps, (x + 1) as f64 * eps);
            worst = worst.max((level - phi.eval(left)).abs()).max((level - phi.eval(right)).abs());
            let mut k = (left / h).ceil() as i64;
            while (k as f64) * h < right {
                worst = worst.max((level - phi.node(k)).abs());
                k += 1;
            }
        }
        // beyond both windows: the steps trail the cone by up to ε
        let gap = eps * self.state.offset() - phi.offset();
        worst.max(gap.abs()).max((gap - eps).abs()).max((gap + eps).abs())
    }
}
