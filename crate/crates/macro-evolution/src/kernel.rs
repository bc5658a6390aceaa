//! Closed forms for the Gaussian kernel `G_t` with variance `t`.
//!
//! Everything is expressed through `Ψ(x) = x Φ(x) + φ(x)`, the second
//! antiderivative of the standard normal density. Second differences of `Ψ`
//! give the exact cell-to-cell transfer weights of `G_t`.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Ψ(x) = x Φ(x) + φ(x)`. Positive arguments go through `Ψ(x) = x + Ψ(-x)`.
pub fn psi(x: f64) -> f64 {
    if x > 0.0 {
        x + psi(-x)
    } else {
        x * normal_cdf(x) + normal_pdf(x)
    }
}

/// `Ψ(x) - max(x, 0)`, the part that decays in both directions.
fn psi_excess(x: f64) -> f64 {
    psi(-x.abs())
}

/// Transfer weights `W_d`, `d = 0..=K`, of `G_t` between cells of width `h`:
/// the cell average over cell `m` of `G_t` applied to the indicator of cell
/// `k` is `W_{|m-k|}`. The same numbers are the node values of `G_t` applied
/// to a hat function of half-width `h`.
#[derive(Clone, Debug)]
pub struct HeatWeights {
    pub h: f64,
    pub t: f64,
    pub w: Vec<f64>,
}

/// Kernel reach in standard deviations; `Ψ(-9)` is about `1e-20`.
const REACH: f64 = 9.0;

impl HeatWeights {
    pub fn new(h: f64, t: f64) -> Self {
        assert!(h > 0.0 && t > 0.0, "need h > 0 and t > 0");
        let rt = t.sqrt();
        let s = h / rt;
        let scale = rt / h;
        let reach = (REACH / s).ceil() as usize + 1;
        let mut w = Vec::with_capacity(reach + 1);
        w.push(scale * (s + 2.0 * psi(-s) - 2.0 * psi(0.0)));
        for d in 1..=reach {
            let d = d as f64;
            w.push(scale * (psi(-(d + 1.0) * s) - 2.0 * psi(-d * s) + psi(-(d - 1.0) * s)));
        }
        Self { h, t, w }
    }

    pub fn reach(&self) -> i64 {
        self.w.len() as i64 - 1
    }

    pub fn at(&self, d: i64) -> f64 {
        self.w.get(d.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// Cell average over `[lo, hi]` of `G_t` applied to `1{y < a}`.
    /// Cells never straddle `a`.
    pub fn step_cell_average(&self, a: f64, lo: f64, hi: f64) -> f64 {
        let rt = self.t.sqrt();
        let scale = rt / (hi - lo);
        if hi <= a {
            1.0 - scale * (psi((hi - a) / rt) - psi((lo - a) / rt))
        } else {
            scale * (psi((a - lo) / rt) - psi((a - hi) / rt))
        }
    }
}

/// `(G_t |·|)(r) = |r| + 2 √t Ψ(-|r|/√t)`.
pub fn heat_abs(r: f64, t: f64) -> f64 {
    let rt = t.sqrt();
    r.abs() + 2.0 * rt * psi_excess(r / rt)
}

/// `(G_t 1{· < a})(r) = Φ((a - r)/√t)`.
pub fn heat_step_value(a: f64, r: f64, t: f64) -> f64 {
    normal_cdf((a - r) / t.sqrt())
}
