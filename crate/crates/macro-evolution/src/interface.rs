use rayon::prelude::*;

use crate::density::{DensityClass, MacroDensity};
use crate::kernel::{heat_abs, HeatWeights};
use crate::MacroError;

/// A macroscopic interface: values at the nodes `kh` of a finite window,
/// linear in between, and equal to the cone `|r| + c` everywhere else.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroInterface {
    h: f64,
    first: i64,
    nodes: Vec<f64>,
    offset: f64,
}

/// Relative slack on the Lipschitz check.
const SLOPE_SLACK: f64 = 1e-9;

impl MacroInterface {
    /// The cone `|r| + c`.
    pub fn cone(h: f64, c: f64) -> Self {
        Self { h, first: 0, nodes: Vec::new(), offset: c }
    }

    pub fn from_nodes(h: f64, first: i64, nodes: Vec<f64>, offset: f64) -> Result<Self, MacroError> {
        if !(h > 0.0) {
            return Err(MacroError::BadParameter(format!("grid spacing {h}")));
        }
        let mut out = Self { h, first, nodes, offset };
        out.check_lipschitz()?;
        out.trim(0.0);
        Ok(out)
    }

    /// Samples `f` at the nodes `lo..=hi`.
    pub fn from_fn(h: f64, lo: i64, hi: i64, offset: f64, f: impl Fn(f64) -> f64) -> Result<Self, MacroError> {
        let nodes = (lo..=hi).map(|k| f(k as f64 * h)).collect();
        Self::from_nodes(h, lo, nodes, offset)
    }

    /// `2jr² + 1/(8j)` on `|r| <= 1/(4j)`, `|r|` outside.
    pub fn stationary(j: f64, h: f64) -> Result<Self, MacroError> {
        if !(j > 0.0) {
            return Err(MacroError::BadParameter(format!("rate {j} must be positive")));
        }
        let s = 1.0 / (4.0 * j);
        let f = |r: f64| if r.abs() <= s { 2.0 * j * r * r + 1.0 / (8.0 * j) } else { r.abs() };
        Self::from_fn(h, (-s / h).floor() as i64, (s / h).ceil() as i64, 0.0, f)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Height `c` of the cone the profile agrees with outside its window.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn last(&self) -> i64 {
        self.first + self.nodes.len() as i64 - 1
    }

    /// Node range covering the window and the cone's kink.
    pub fn node_range(&self) -> (i64, i64) {
        if self.nodes.is_empty() {
            (0, 0)
        } else {
            (self.first.min(0), self.last().max(0))
        }
    }

    pub fn window(&self) -> (f64, f64) {
        if self.nodes.is_empty() {
            (0.0, 0.0)
        } else {
            (self.first as f64 * self.h, self.last() as f64 * self.h)
        }
    }

    fn cone_at(&self, k: i64) -> f64 {
        (k as f64 * self.h).abs() + self.offset
    }

    pub fn node(&self, k: i64) -> f64 {
        if k < self.first || k > self.last() {
            self.cone_at(k)
        } else {
            self.nodes[(k - self.first) as usize]
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let x = r / self.h;
        let k = x.floor() as i64;
        let frac = x - k as f64;
        if frac == 0.0 {
            return self.node(k);
        }
        (1.0 - frac) * self.node(k) + frac * self.node(k + 1)
    }

    fn check_lipschitz(&self) -> Result<(), MacroError> {
        if self.nodes.is_empty() {
            return Ok(());
        }
        for k in (self.first - 1)..=self.last() {
            let slope = (self.node(k + 1) - self.node(k)) / self.h;
            if slope.abs() > 1.0 + SLOPE_SLACK {
                return Err(MacroError::Lipschitz { r: k as f64 * self.h, slope });
            }
        }
        Ok(())
    }

    fn trim(&mut self, tol: f64) {
        let lead = (0..self.nodes.len())
            .take_while(|&i| (self.nodes[i] - self.cone_at(self.first + i as i64)).abs() <= tol)
            .count();
        self.nodes.drain(..lead);
        self.first += lead as i64;
        while let Some(&v) = self.nodes.last() {
            if (v - self.cone_at(self.last())).abs() > tol {
                break;
            }
            self.nodes.pop();
        }
        if self.nodes.is_empty() {
            self.first = 0;
        }
    }

    /// `G_t φ` at the nodes, tails cut at `tail_tol`.
    pub fn heat(&self, t: f64, tail_tol: f64) -> Self {
        if t <= 0.0 {
            return self.clone();
        }
        self.heat_with(&HeatWeights::new(self.h, t), tail_tol)
    }

    pub fn heat_with(&self, w: &HeatWeights, tail_tol: f64) -> Self {
        assert!((w.h - self.h).abs() <= 1e-15 * self.h, "weights built for another grid");
        let reach = w.reach();
        let h = self.h;
        let (lo, hi) = if self.nodes.is_empty() { (0, 0) } else { (self.first, self.last()) };
        let out_first = lo.min(0) - reach;
        let out_last = hi.max(0) + reach;
        let excess: Vec<f64> = self.nodes.iter().enumerate().map(|(i, v)| v - self.cone_at(self.first + i as i64)).collect();
        let nodes: Vec<f64> = (out_first..=out_last)
            .into_par_iter()
            .map(|m| {
                let mut v = heat_abs(m as f64 * h, w.t) + self.offset;
                if !excess.is_empty() {
                    let k0 = (m - reach).max(self.first);
                    let k1 = (m + reach).min(self.last());
                    for k in k0..=k1 {
                        v += w.at(m - k) * excess[(k - self.first) as usize];
                    }
                }
                v
            })
            .collect();
        let mut out = Self { h, first: out_first, nodes, offset: self.offset };
        out.trim(tail_tol);
        out
    }

    /// `max(φ, |r| + c)`.
    pub fn cone_max(&self, c: f64) -> Self {
        let mut out = self.clone();
        if c > out.offset {
            for (i, v) in out.nodes.iter_mut().enumerate() {
                *v = v.max(((self.first + i as i64) as f64 * self.h).abs() + c);
            }
            out.offset = c;
        }
        out.trim(0.0);
        out
    }

    /// `(min, max)` of `self - other` over the real line.
    pub fn difference_range(&self, other: &Self) -> (f64, f64) {
        assert_eq!(self.h, other.h, "profiles on different grids");
        let (a0, a1) = self.node_range();
        let (b0, b1) = other.node_range();
        let tail = self.offset - other.offset;
        let (mut min, mut max) = (tail, tail);
        for k in a0.min(b0)..=a1.max(b1) {
            let d = self.node(k) - other.node(k);
            min = min.min(d);
            max = max.max(d);
        }
        (min, max)
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        let (lo, hi) = self.difference_range(other);
        lo.abs().max(hi.abs())
    }

    /// Nodewise midpoint of two profiles.
    pub fn midpoint(&self, other: &Self) -> Self {
        assert_eq!(self.h, other.h, "profiles on different grids");
        let (a0, a1) = self.node_range();
        let (b0, b1) = other.node_range();
        let (lo, hi) = (a0.min(b0), a1.max(b1));
        let nodes = (lo..=hi).map(|k| 0.5 * (self.node(k) + other.node(k))).collect();
        let mut out = Self { h: self.h, first: lo, nodes, offset: 0.5 * (self.offset + other.offset) };
        out.trim(0.0);
        out
    }

    /// Adds a constant, moving the cone with it.
    pub fn lifted(&self, c: f64) -> Self {
        Self { h: self.h, first: self.first, nodes: self.nodes.iter().map(|v| v + c).collect(), offset: self.offset + c }
    }

    /// `min_r (φ(r) - |r|)`; the minimum over a piecewise-linear function is at a node.
    pub fn min_above_abs(&self) -> f64 {
        let (lo, hi) = self.node_range();
        (lo..=hi).map(|k| self.node(k) - (k as f64 * self.h).abs()).fold(self.offset, f64::min)
    }
}

/// `φ(r) = r + 2F(r; ρ) + c`: slope `1 - 2ρ`, equal to `|r| + c` in the tails
/// when the median of `ρ` is at the origin.
pub fn density_to_interface(rho: &MacroDensity, c: f64) -> MacroInterface {
    let h = rho.h();
    let first = rho.first();
    let n = rho.cells().len() as i64;
    if n == 0 {
        // a step at a = first·h; only a = 0 is consistent with the cone tails
        let a = first as f64 * h;
        if first == 0 {
            return MacroInterface::cone(h, c);
        }
        let lo = first.min(0);
        let nodes = (lo..=first.max(0))
            .map(|k| {
                let r = k as f64 * h;
                r + 2.0 * (a - r).max(0.0) + c
            })
            .collect();
        let mut out = MacroInterface { h, first: lo, nodes, offset: c };
        out.trim(0.0);
        return out;
    }
    let lo = first.min(0);
    let hi = (first + n).max(0);
    let mut suffix = vec![0.0; (n + 1) as usize];
    for i in (0..n as usize).rev() {
        suffix[i] = suffix[i + 1] + rho.cells()[i] * h;
    }
    let mass_at = |k: i64| -> f64 {
        if k >= first + n {
            0.0
        } else if k >= first {
            suffix[(k - first) as usize]
        } else {
            (first - k) as f64 * h + suffix[0]
        }
    };
    let nodes = (lo..=hi).map(|k| k as f64 * h + 2.0 * mass_at(k) + c).collect();
    let mut out = MacroInterface { h, first: lo, nodes, offset: c };
    out.trim(0.0);
    out
}

/// `ρ = (1 - φ') / 2`, read off cell by cell from the node differences.
pub fn interface_to_density(phi: &MacroInterface) -> Result<MacroDensity, MacroError> {
    let h = phi.h();
    if phi.nodes().is_empty() {
        return Ok(MacroDensity::heaviside(h));
    }
    let (lo, hi) = phi.node_range();
    // one extra cell on each side reaches back to the cone
    let mut cells = Vec::with_capacity((hi - lo + 2) as usize);
    for k in (lo - 1)..=hi {
        let slope = (phi.node(k + 1) - phi.node(k)) / h;
        if slope.abs() > 1.0 + SLOPE_SLACK {
            return Err(MacroError::Lipschitz { r: k as f64 * h, slope });
        }
        cells.push(((1.0 - slope) / 2.0).clamp(0.0, 1.0));
    }
    MacroDensity::from_cells(h, lo - 1, cells, DensityClass::Continuous)
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = 1e-3;

    #[test]
    fn stationary_values() {
        let p = MacroInterface::stationary(1.0, H).unwrap();
        assert!((p.eval(0.0) - 0.125).abs() < 1e-15);
        assert!((p.eval(0.25) - 0.25).abs() < 1e-15);
        assert!((p.eval(-0.25) - 0.25).abs() < 1e-15);
        assert!((p.eval(3.0) - 3.0).abs() < 1e-15);
        assert!((p.min_above_abs()).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_is_enforced() {
        assert!(MacroInterface::from_nodes(H, 0, vec![0.0, 0.01], 0.0).is_err());
        assert!(MacroInterface::from_nodes(H, 0, vec![0.0, 0.001, 0.002], 0.0).is_ok());
    }

    #[test]
    fn step_gives_cone() {
        let phi = density_to_interface(&MacroDensity::heaviside(H), 0.0);
        assert_eq!(phi, MacroInterface::cone(H, 0.0));
        assert!((phi.eval(-0.7) - 0.7).abs() < 1e-15);
        assert!(interface_to_density(&phi).unwrap().is_step());
    }

    #[test]
    fn stationary_pair_matches() {
        let rho = MacroDensity::stationary(1.0, H).unwrap();
        let phi = density_to_interface(&rho, 0.0);
        let exact = MacroInterface::stationary(1.0, H).unwrap();
        assert!(phi.sup_distance(&exact) < 1e-12);
        assert!((phi.eval(0.0) - 2.0 * rho.mass_right(0.0)).abs() < 1e-12);
        let back = interface_to_density(&phi).unwrap();
        assert!(back.sup_distance(&rho) < 1e-9, "{} {:?} {:?}", back.sup_distance(&rho), back.window(), rho.window());
    }

    #[test]
    fn heat_of_cone() {
        let p = MacroInterface::cone(H, 0.5).heat(0.01, 1e-12);
        assert!((p.eval(0.0) - (0.5 + 2.0 * 0.1 * crate::kernel::psi(0.0))).abs() < 1e-13);
        assert!(p.offset() == 0.5);
        assert!((p.eval(2.0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn heat_of_parabola_region() {
        // G_t(2jr² + c) = 2jr² + c + 2jt away from the tangency points
        let p = MacroInterface::stationary(1.0, H).unwrap().heat(1e-4, 1e-12);
        assert!((p.eval(0.0) - (0.125 + 2e-4)).abs() < 1e-6);
    }

    #[test]
    fn cone_max_and_ranges() {
        let p = MacroInterface::stationary(1.0, H).unwrap();
        let q = p.cone_max(0.1);
        assert_eq!(q.offset(), 0.1);
        assert!((q.eval(0.0) - 0.125).abs() < 1e-15);
        assert!((q.eval(0.2) - 0.3).abs() < 1e-12);
        let (lo, hi) = q.difference_range(&p);
        assert!(lo.abs() < 1e-15 && (hi - 0.1).abs() < 1e-15);
        let m = q.midpoint(&p);
        assert!((m.offset() - 0.05).abs() < 1e-15);
        assert!((p.lifted(0.3).eval(1.0) - 1.3).abs() < 1e-15);
    }
}
