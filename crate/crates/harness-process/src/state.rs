use std::io::Write;

use crate::HarnessError;

/// Heights `K(x)` on a finite window of sites; `K(x) = |x| + c` elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct HarnessState {
    start: i64,
    heights: Vec<f64>,
    offset: f64,
    steps: u64,
}

/// Differences from the cone below this (relative to the height) are trimmed.
const TRIM_TOL: f64 = 1e-14;

impl HarnessState {
    /// The cone `|x| + c`.
    pub fn cone(c: f64) -> Self {
        Self { start: 0, heights: Vec::new(), offset: c, steps: 0 }
    }

    /// Heights on `start..start + heights.len()`; they must lie on or above the cone.
    pub fn new(start: i64, heights: Vec<f64>, offset: f64) -> Result<Self, HarnessError> {
        for (i, &v) in heights.iter().enumerate() {
            let x = start + i as i64;
            let floor = x.abs() as f64 + offset;
            if !v.is_finite() || v < floor - TRIM_TOL * floor.abs().max(1.0) {
                return Err(HarnessError::BelowCone { x, value: v, offset });
            }
        }
        let mut s = Self { start, heights, offset, steps: 0 };
        s.trim();
        Ok(s)
    }

    pub fn from_fn(lo: i64, hi: i64, offset: f64, f: impl Fn(i64) -> f64) -> Result<Self, HarnessError> {
        Self::new(lo, (lo..=hi).map(f).collect(), offset)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Height `c` of the cone outside the window.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Number of averaging steps applied so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn end(&self) -> i64 {
        self.start + self.heights.len() as i64
    }

    /// Sites covering the window and `[-1, 1]`.
    pub fn span(&self) -> (i64, i64) {
        if self.heights.is_empty() {
            (-1, 1)
        } else {
            (self.start.min(-1), (self.end() - 1).max(1))
        }
    }

    pub fn get(&self, x: i64) -> f64 {
        if x < self.start || x >= self.end() {
            x.abs() as f64 + self.offset
        } else {
            self.heights[(x - self.start) as usize]
        }
    }

    fn near_cone(&self, x: i64, v: f64) -> bool {
        let cone = x.abs() as f64 + self.offset;
        (v - cone).abs() <= TRIM_TOL * cone.abs().max(1.0)
    }

    fn trim(&mut self) {
        let lead = (0..self.heights.len()).take_while(|&i| self.near_cone(self.start + i as i64, self.heights[i])).count();
        self.heights.drain(..lead);
        self.start += lead as i64;
        while let Some(&v) = self.heights.last() {
            if !self.near_cone(self.end() - 1, v) {
                break;
            }
            self.heights.pop();
        }
        if self.heights.is_empty() {
            self.start = 0;
        }
    }

    /// `K'(x) = (K(x-1) + K(x+1)) / 2` at every site.
    pub fn theta_step(&self) -> Self {
        let (lo, hi) = self.span();
        let heights = ((lo - 1)..=(hi + 1)).map(|x| 0.5 * (self.get(x - 1) + self.get(x + 1))).collect();
        let mut out = Self { start: lo - 1, heights, offset: self.offset, steps: self.steps + 1 };
        out.trim();
        out
    }

    /// `max(K, |x| + c)`.
    pub fn cone_max(&self, c: f64) -> Self {
        let mut out = self.clone();
        if c > self.offset {
            for (i, v) in out.heights.iter_mut().enumerate() {
                *v = v.max((self.start + i as i64).abs() as f64 + c);
            }
            out.offset = c;
            out.trim();
        }
        out
    }

    /// `(min, max)` of `self - other` over all sites.
    pub fn difference_range(&self, other: &Self) -> (f64, f64) {
        let (a0, a1) = self.span();
        let (b0, b1) = other.span();
        let tail = self.offset - other.offset;
        let (mut lo, mut hi) = (tail, tail);
        for x in a0.min(b0)..=a1.max(b1) {
            let d = self.get(x) - other.get(x);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }

    pub fn lifted(&self, c: f64) -> Self {
        Self { start: self.start, heights: self.heights.iter().map(|v| v + c).collect(), offset: self.offset + c, steps: self.steps }
    }
}

fn check_rate(rate: f64) -> Result<(), HarnessError> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(HarnessError::BadParameter(format!("rate {rate} must be nonnegative")));
    }
    Ok(())
}

/// `K_n = max(Θ K_{n-1}, |x| + c₀ + 2Jn)` for `n_steps` steps, `c₀` the starting cone height.
pub fn harness_evolve(k0: &HarnessState, rate: f64, n_steps: u64) -> Result<HarnessState, HarnessError> {
    check_rate(rate)?;
    let c0 = k0.offset;
    let mut k = k0.clone();
    for n in 1..=n_steps {
        k = k.theta_step().cone_max(c0 + 2.0 * rate * n as f64);
    }
    Ok(k)
}

/// `1/(8J) + 2Jx²` for `|x| <= 1/(4J)`, `|x|` beyond.
pub fn traveling_wave(rate: f64) -> Result<HarnessState, HarnessError> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(HarnessError::BadParameter(format!("rate {rate} must be positive")));
    }
    let s = 1.0 / (4.0 * rate);
    let reach = s.ceil() as i64;
    HarnessState::from_fn(-reach, reach, 0.0, |x| {
        let x = x as f64;
        if x.abs() <= s {
            1.0 / (8.0 * rate) + 2.0 * rate * x * x
        } else {
            x.abs()
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaSide {
    /// Cone applied at block ends with the current height.
    Lower,
    /// Cone applied at block starts with the height of the block's end.
    Upper,
}

fn delta_cone(c0: f64, rate: f64, block: u64, n: u64, side: DeltaSide) -> f64 {
    let lead = if side == DeltaSide::Upper { block } else { 0 };
    c0 + 2.0 * rate * (n + lead) as f64
}

fn check_block(block: u64) -> Result<(), HarnessError> {
    if block == 0 {
        return Err(HarnessError::BadParameter("block length must be at least one step".into()));
    }
    Ok(())
}

/// Averaging every step, cone constraint only at multiples of `block`.
pub fn delta_harness_evolve(k0: &HarnessState, rate: f64, block: u64, n_steps: u64, side: DeltaSide) -> Result<HarnessState, HarnessError> {
    check_rate(rate)?;
    check_block(block)?;
    let c0 = k0.offset;
    let mut k = if side == DeltaSide::Upper { k0.cone_max(delta_cone(c0, rate, block, 0, side)) } else { k0.clone() };
    for n in 1..=n_steps {
        k = k.theta_step();
        if n % block == 0 {
            k = k.cone_max(delta_cone(c0, rate, block, n, side));
        }
    }
    Ok(k)
}

#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub lower: HarnessState,
    pub exact: HarnessState,
    pub upper: HarnessState,
    /// `max_n sup_x (K⁺_n - K⁻_n)`.
    pub max_gap: f64,
    /// Smallest of `K - K⁻` and `K⁺ - K` seen; negative means the order broke.
    pub min_margin: f64,
}

/// Runs the three processes side by side, checking `K⁻ <= K <= K⁺` after every step.
pub fn delta_harness_sandwich(k0: &HarnessState, rate: f64, block: u64, n_steps: u64) -> Result<SandwichReport, HarnessError> {
    check_rate(rate)?;
    check_block(block)?;
    let c0 = k0.offset;
    let mut lower = k0.clone();
    let mut exact = k0.clone();
    let mut upper = k0.cone_max(delta_cone(c0, rate, block, 0, DeltaSide::Upper));
    let mut max_gap = upper.difference_range(&lower).1;
    let mut min_margin = f64::INFINITY;
    // exact comparisons; averaging is monotone in floating point as well
    let tol = 1e-12;
    for n in 0..=n_steps {
        if n > 0 {
            lower = lower.theta_step();
            upper = upper.theta_step();
            exact = exact.theta_step().cone_max(c0 + 2.0 * rate * n as f64);
            if n % block == 0 {
                lower = lower.cone_max(delta_cone(c0, rate, block, n, DeltaSide::Lower));
                upper = upper.cone_max(delta_cone(c0, rate, block, n, DeltaSide::Upper));
            }
        }
        let below = exact.difference_range(&lower).0;
        let above = upper.difference_range(&exact).0;
        min_margin = min_margin.min(below).min(above);
        max_gap = max_gap.max(upper.difference_range(&lower).1);
        for (margin, what, a, b) in [(below, "exact below lower", &exact, &lower), (above, "upper below exact", &upper, &exact)] {
            if margin < -tol {
                let (lo, hi) = a.span();
                let x = (lo.min(b.span().0)..=hi.max(b.span().1)).find(|&x| a.get(x) - b.get(x) < -tol).unwrap_or(0);
                return Err(HarnessError::Sandwich { step: n, x, what });
            }
        }
    }
    Ok(SandwichReport { lower, exact, upper, max_gap, min_margin })
}

/// `x,K` rows over the window plus one cone site on each side.
pub fn write_harness_csv<W: Write>(mut out: W, k: &HarnessState, rate: f64) -> Result<(), HarnessError> {
    writeln!(out, "# J={rate}")?;
    writeln!(out, "# n={}", k.steps)?;
    writeln!(out, "# offset={}", k.offset)?;
    writeln!(out, "x,K")?;
    let (lo, hi) = k.span();
    for x in (lo - 1)..=(hi + 1) {
        writeln!(out, "{x},{}", k.get(x))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averaging_the_kink() {
        let k = HarnessState::cone(0.0).theta_step();
        assert_eq!(k.get(0), 1.0);
        for x in [-5, -1, 1, 7] {
            assert_eq!(k.get(x), x.abs() as f64);
        }
        assert_eq!(k.steps(), 1);
    }

    #[test]
    fn quadratic_gains_a() {
        // K = a x² + b on the window, checked away from the window edges
        let (a, b) = (0.25, 3.0);
        let k = HarnessState::from_fn(-50, 50, 0.0, |x| a * (x * x) as f64 + b + 1000.0).unwrap();
        let k1 = k.theta_step();
        for x in -48..=48 {
            assert!((k1.get(x) - (a * (x * x) as f64 + b + 1000.0 + a)).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_is_harmonic() {
        let k = HarnessState::from_fn(-20, 20, 0.0, |x| 100.0 + 0.5 * x as f64).unwrap();
        let k1 = k.theta_step();
        for x in -19..=19 {
            assert_eq!(k1.get(x), 100.0 + 0.5 * x as f64);
        }
    }

    #[test]
    fn one_step_from_cone() {
        let j = 0.1;
        let k = harness_evolve(&HarnessState::cone(0.0), j, 1).unwrap();
        assert!((k.get(0) - 1.0).abs() < 1e-15);
        assert!((k.get(3) - 3.2).abs() < 1e-15);
        assert!((k.offset() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn wave_shape() {
        let w = traveling_wave(0.05).unwrap();
        assert_eq!(w.get(0), 2.5);
        assert!((w.get(5) - 5.0).abs() < 1e-15);
        assert_eq!(w.get(9), 9.0);
        assert_eq!(w.offset(), 0.0);
        assert!(traveling_wave(0.0).is_err());
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_harness_csv(&mut buf, &traveling_wave(0.25).unwrap(), 0.25).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("x,K\n"));
        assert!(text.contains("\n0,0.5\n"));
    }
}
