use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::HeatWeights;
use crate::MacroError;

/// Which class of initial data a profile approximates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityClass {
    /// Exactly 1 to the left and 0 to the right of a finite window.
    FiniteBoundaries,
    /// Smooth tails, cut off where they are within the tail tolerance of 0 or 1.
    Continuous,
}

/// Numerical parameters shared by the macroscopic routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub h: f64,
    pub tail_tol: f64,
    pub median_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { h: 1e-3, tail_tol: 1e-10, median_tol: 1e-2 }
    }
}

impl GridSpec {
    pub fn with_h(h: f64) -> Self {
        Self { h, median_tol: 10.0 * h, ..Self::default() }
    }
}

/// A density profile stored as averages over the cells `[kh, (k+1)h)`.
/// Left of the window it is 1, right of it 0.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroDensity {
    h: f64,
    first: i64,
    cells: Vec<f64>,
    class: DensityClass,
}

/// Slack allowed when validating values that come out of floating-point sums.
const VALUE_SLACK: f64 = 1e-9;

impl MacroDensity {
    /// `1{r < 0}`.
    pub fn heaviside(h: f64) -> Self {
        Self { h, first: 0, cells: Vec::new(), class: DensityClass::FiniteBoundaries }
    }

    pub fn from_cells(h: f64, first: i64, cells: Vec<f64>, class: DensityClass) -> Result<Self, MacroError> {
        if !(h > 0.0) {
            return Err(MacroError::BadParameter(format!("grid spacing {h}")));
        }
        let mut cells = cells;
        for (i, v) in cells.iter_mut().enumerate() {
            if !(*v >= -VALUE_SLACK && *v <= 1.0 + VALUE_SLACK) {
                return Err(MacroError::OutOfRange { cell: first + i as i64, value: *v });
            }
            *v = v.clamp(0.0, 1.0);
        }
        let mut d = Self { h, first, cells, class };
        d.trim(0.0);
        Ok(d)
    }

    /// Exact cell averages of a density given by its antiderivative `prim`,
    /// over cells `lo..hi`.
    pub fn from_antiderivative(h: f64, lo: i64, hi: i64, prim: impl Fn(f64) -> f64, class: DensityClass) -> Result<Self, MacroError> {
        let cells = (lo..hi).map(|k| (prim((k + 1) as f64 * h) - prim(k as f64 * h)) / h).collect();
        Self::from_cells(h, lo, cells, class)
    }

    /// The linear profile `½ - 2jr` on `|r| <= 1/(4j)`.
    pub fn stationary(j: f64, h: f64) -> Result<Self, MacroError> {
        if !(j > 0.0) {
            return Err(MacroError::BadParameter(format!("rate {j} must be positive")));
        }
        let s = 1.0 / (4.0 * j);
        let inner = |r: f64| 0.5 * r - j * r * r;
        let prim = |r: f64| {
            if r <= -s {
                r + s + inner(-s)
            } else if r >= s {
                inner(s)
            } else {
                inner(r)
            }
        };
        let lo = (-s / h).floor() as i64;
        let hi = (s / h).ceil() as i64;
        Self::from_antiderivative(h, lo, hi, prim, DensityClass::FiniteBoundaries)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn class(&self) -> DensityClass {
        self.class
    }

    pub fn with_class(mut self, class: DensityClass) -> Self {
        self.class = class;
        self
    }

    fn end(&self) -> i64 {
        self.first + self.cells.len() as i64
    }

    /// `[a, b]`; for a step this is a single point.
    pub fn window(&self) -> (f64, f64) {
        (self.first as f64 * self.h, self.end() as f64 * self.h)
    }

    pub fn is_step(&self) -> bool {
        self.cells.is_empty()
    }

    /// Average over cell `k`, including the constant tails.
    pub fn cell(&self, k: i64) -> f64 {
        if k < self.first {
            1.0
        } else if k >= self.end() {
            0.0
        } else {
            self.cells[(k - self.first) as usize]
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.cell((r / self.h).floor() as i64)
    }

    fn trim(&mut self, tol: f64) {
        let lead = self.cells.iter().take_while(|&&v| v >= 1.0 - tol).count();
        self.cells.drain(..lead);
        self.first += lead as i64;
        while self.cells.last().is_some_and(|&v| v <= tol) {
            self.cells.pop();
        }
    }

    /// `h Σ_{m>=i} ρ_m` over the window, for every edge `i` in `first..=end`.
    fn suffix_masses(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cells.len() + 1];
        for i in (0..self.cells.len()).rev() {
            out[i] = out[i + 1] + self.cells[i] * self.h;
        }
        out
    }

    /// `F(r) = ∫_r^∞ ρ`.
    pub fn mass_right(&self, r: f64) -> f64 {
        let (a, b) = self.window();
        if r >= b {
            return 0.0;
        }
        let suffix = self.suffix_masses();
        if r <= a {
            return (a - r) + suffix[0];
        }
        let k = ((r / self.h).floor() as i64).clamp(self.first, self.end() - 1);
        let i = (k - self.first) as usize;
        self.cells[i] * ((k + 1) as f64 * self.h - r) + suffix[i + 1]
    }

    /// `F̂(r) = ∫_{-∞}^r (1 - ρ)`.
    pub fn antimass_left(&self, r: f64) -> f64 {
        let (a, b) = self.window();
        if r <= a {
            return 0.0;
        }
        let mut acc = 0.0;
        for (i, v) in self.cells.iter().enumerate() {
            let lo = (self.first + i as i64) as f64 * self.h;
            let hi = lo + self.h;
            if r <= hi {
                return acc + (1.0 - v) * (r - lo);
            }
            acc += (1.0 - v) * self.h;
        }
        acc + (r - b)
    }

    /// `F(0) - F̂(0)`; zero when the median is at the origin.
    pub fn median_defect(&self) -> f64 {
        self.mass_right(0.0) - self.antimass_left(0.0)
    }

    /// The points `l <= r` with `F̂(l) = δ` and `F(r) = δ`.
    pub fn quantiles(&self, delta: f64) -> Result<(f64, f64), MacroError> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(MacroError::BadParameter(format!("mass {delta} must be positive")));
        }
        let h = self.h;
        let (a, b) = self.window();

        let suffix = self.suffix_masses();
        let mut right = None;
        for i in (0..self.cells.len()).rev() {
            if suffix[i] >= delta {
                let k = self.first + i as i64;
                right = Some((k + 1) as f64 * h - (delta - suffix[i + 1]) / self.cells[i]);
                break;
            }
        }
        let right = right.unwrap_or(a - (delta - suffix[0]));

        let mut left = None;
        let mut acc = 0.0;
        for (i, v) in self.cells.iter().enumerate() {
            let next = acc + (1.0 - v) * h;
            if next >= delta {
                let k = self.first + i as i64;
                left = Some(k as f64 * h + (delta - acc) / (1.0 - v));
                break;
            }
            acc = next;
        }
        let left = left.unwrap_or(b + (delta - acc));
        Ok((left, right))
    }

    /// Removes mass `δ` beyond the right quantile and fills antimass `δ`
    /// beyond the left one. Returns the step `1{r < 0}` when the right
    /// quantile is not positive.
    pub fn gamma(&self, delta: f64) -> Result<Self, MacroError> {
        if delta == 0.0 {
            return Ok(self.clone());
        }
        let (l, r) = self.quantiles(delta)?;
        if r <= 0.0 || l >= r {
            return Ok(Self::heaviside(self.h));
        }
        let h = self.h;
        let lo_k = (l / h).floor() as i64;
        let hi_k = (r / h).ceil() as i64;
        let cells = (lo_k..hi_k)
            .map(|k| {
                let lo = k as f64 * h;
                let hi = (k + 1) as f64 * h;
                if lo >= l && hi <= r {
                    return self.cell(k);
                }
                let fill = (hi.min(l) - lo).max(0.0);
                let keep = (hi.min(r) - lo.max(l)).max(0.0);
                ((fill + self.cell(k) * keep) / h).clamp(0.0, 1.0)
            })
            .collect();
        let mut out = Self { h, first: lo_k, cells, class: DensityClass::FiniteBoundaries };
        out.trim(0.0);
        Ok(out)
    }

    /// `G_t ρ` in a single exact-kernel step, tails cut at `tail_tol`.
    pub fn heat(&self, t: f64, tail_tol: f64) -> Self {
        if t <= 0.0 {
            return self.clone();
        }
        let w = HeatWeights::new(self.h, t);
        self.heat_with(&w, tail_tol)
    }

    pub fn heat_with(&self, w: &HeatWeights, tail_tol: f64) -> Self {
        assert!((w.h - self.h).abs() <= 1e-15 * self.h, "weights built for another grid");
        let reach = w.reach();
        let h = self.h;
        let a = self.first as f64 * h;
        let out_first = self.first - reach;
        let out_end = self.end() + reach;
        let cells: Vec<f64> = (out_first..out_end)
            .into_par_iter()
            .map(|m| {
                let lo = m as f64 * h;
                let mut v = w.step_cell_average(a, lo, lo + h);
                let k0 = (m - reach).max(self.first);
                let k1 = (m + reach).min(self.end() - 1);
                for k in k0..=k1 {
                    v += w.at(m - k) * self.cells[(k - self.first) as usize];
                }
                v.clamp(0.0, 1.0)
            })
            .collect();
        let mut out = Self { h, first: out_first, cells, class: DensityClass::Continuous };
        out.trim(tail_tol);
        out
    }

    /// `max_k |ρ_k - σ_k|` over cells.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let lo = self.first.min(other.first);
        let hi = self.end().max(other.end());
        (lo..hi).map(|k| (self.cell(k) - other.cell(k)).abs()).fold(0.0, f64::max)
    }

    /// `sup_{a<b} |∫_a^b (ρ - σ)|`, computed as the oscillation of the
    /// running integral of the difference.
    pub fn sup_interval_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.h, other.h, "profiles on different grids");
        let lo = self.first.min(other.first);
        let hi = self.end().max(other.end());
        let (mut s, mut max, mut min) = (0.0f64, 0.0f64, 0.0f64);
        for k in lo..hi {
            s += (self.cell(k) - other.cell(k)) * self.h;
            max = max.max(s);
            min = min.min(s);
        }
        max - min
    }
}
