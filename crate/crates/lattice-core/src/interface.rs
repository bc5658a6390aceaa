use crate::{LatticeError, ParticleConfig};

/// Apex of a cone `V_v(x) = |x - v1| + v2`.
///
/// Admissible vertices have `v2 >= 0` and `v1 + v2` even; intermediate
/// results of [`Interface::translate`] may leave that set, so the fields are
/// plain integers and admissibility is checked where it matters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub v1: i64,
    pub v2: i64,
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { v1: 0, v2: 0 };

    pub fn new(v1: i64, v2: i64) -> Result<Self, LatticeError> {
        let v = Vertex { v1, v2 };
        if v.is_admissible() {
            Ok(v)
        } else {
            Err(LatticeError::BadVertex { v1, v2 })
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.v2 >= 0 && (self.v1 + self.v2).rem_euclid(2) == 0
    }

    pub fn cone_at(&self, x: i64) -> i64 {
        (x - self.v1).abs() + self.v2
    }

    /// Cone order: `self <= other` iff `V_self <= V_other` pointwise.
    pub fn cone_le(&self, other: &Vertex) -> bool {
        other.v2 - self.v2 >= (other.v1 - self.v1).abs()
    }

    pub fn offset(&self, d1: i64, d2: i64) -> Vertex {
        Vertex { v1: self.v1 + d1, v2: self.v2 + d2 }
    }
}

/// Height function with unit slopes that equals a cone outside `[L, R]`.
///
/// `L` is the first site where the height rises, `R` the last site reached by
/// a descent. Left of `L` the height grows by one per step leftwards, right of
/// `R` by one per step rightwards. A bare cone has `L = R = v1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interface {
    start: i64,
    heights: Vec<i64>,
}

impl Interface {
    pub fn cone(v: Vertex) -> Self {
        Self { start: v.v1, heights: vec![v.v2] }
    }

    /// Validates slopes and parity, then trims to canonical form.
    pub fn from_heights(start: i64, heights: Vec<i64>) -> Result<Self, LatticeError> {
        if heights.is_empty() {
            return Err(LatticeError::Parse { what: "interface", msg: "empty window".into() });
        }
        for (i, w) in heights.windows(2).enumerate() {
            let diff = w[1] - w[0];
            if diff.abs() != 1 {
                return Err(LatticeError::Slope { x: start + i as i64, diff });
            }
        }
        if (start + heights[0]).rem_euclid(2) != 0 {
            return Err(LatticeError::Parity { x: start, height: heights[0] });
        }
        let mut out = Self { start, heights };
        out.trim();
        Ok(out)
    }

    /// Builds the interface whose increments are `+1` at holes and `-1` at
    /// particles of `η`, normalized so that its vertex height is `v2`.
    pub fn from_particles(eta: &ParticleConfig, v2: i64) -> Result<Self, LatticeError> {
        let (l, _) = eta.boundaries();
        let mut heights = Vec::with_capacity(eta.width() + 1);
        let mut h = 0i64;
        heights.push(h);
        for b in eta.window() {
            h += if b { -1 } else { 1 };
            heights.push(h);
        }
        let r = l + heights.len() as i64 - 1;
        let raw_v2 = (heights[0] + h + l - r) / 2;
        let lift = v2 - raw_v2;
        let v1 = eta.median_floor() + 1;
        if (v1 + v2).rem_euclid(2) != 0 {
            return Err(LatticeError::Parity { x: v1, height: v2 });
        }
        for y in heights.iter_mut() {
            *y += lift;
        }
        let mut out = Self { start: l, heights };
        out.trim();
        Ok(out)
    }

    fn trim(&mut self) {
        let mut lo = 0usize;
        let mut hi = self.heights.len() - 1;
        while lo < hi && self.heights[lo + 1] - self.heights[lo] == -1 {
            lo += 1;
        }
        while hi > lo && self.heights[hi] - self.heights[hi - 1] == 1 {
            hi -= 1;
        }
        if lo > 0 || hi + 1 < self.heights.len() {
            self.heights.truncate(hi + 1);
            self.heights.drain(..lo);
            self.start += lo as i64;
        }
    }

    /// `(L, R)` of the stored window.
    pub fn bounds(&self) -> (i64, i64) {
        (self.start, self.start + self.heights.len() as i64 - 1)
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn get(&self, x: i64) -> i64 {
        let (l, r) = self.bounds();
        if x < l {
            self.heights[0] + (l - x)
        } else if x > r {
            self.heights[self.heights.len() - 1] + (x - r)
        } else {
            self.heights[(x - l) as usize]
        }
    }

    pub fn vertex(&self) -> Vertex {
        let (l, r) = self.bounds();
        let (hl, hr) = (self.get(l), self.get(r));
        Vertex { v1: (hl - hr + l + r) / 2, v2: (hl + hr + l - r) / 2 }
    }

    /// Sets the height at `x` directly. The caller keeps slopes at ±1; the
    /// window is extended and re-trimmed around the change.
    pub fn set(&mut self, x: i64, value: i64) {
        self.cover(x - 1, x + 1);
        let (l, _) = self.bounds();
        self.heights[(x - l) as usize] = value;
        self.trim();
    }

    /// Materializes the tails so that `[lo, hi]` lies inside the stored window.
    fn cover(&mut self, lo: i64, hi: i64) {
        let (l, r) = self.bounds();
        if lo < l {
            let extra = (l - lo) as usize;
            let h0 = self.heights[0];
            let mut front: Vec<i64> = (0..extra).map(|k| h0 + (extra - k) as i64).collect();
            front.extend_from_slice(&self.heights);
            self.heights = front;
            self.start = lo;
        }
        if hi > r {
            let last = *self.heights.last().unwrap();
            for k in 1..=(hi - r) {
                self.heights.push(last + k);
            }
        }
    }

    /// Pointwise maximum with the cone `V_v`.
    pub fn cone_join(&self, v: Vertex) -> Interface {
        let (l, r) = self.bounds();
        let lo = l.min(v.v1) - 1;
        let hi = r.max(v.v1) + 1;
        let heights = (lo..=hi).map(|x| self.get(x).max(v.cone_at(x))).collect();
        let mut out = Self { start: lo, heights };
        out.trim();
        out
    }

    /// In-place version of [`cone_join`](Self::cone_join); returns whether anything changed.
    pub fn cone_join_in_place(&mut self, v: Vertex) -> bool {
        let joined = self.cone_join(v);
        if joined != *self {
            *self = joined;
            true
        } else {
            false
        }
    }

    /// `θ_v ξ(x) = ξ(x - v1) - v2`. The vertex moves by `(v1, -v2)`.
    pub fn translate(&self, v1: i64, v2: i64) -> Result<Interface, LatticeError> {
        if (v1 + v2).rem_euclid(2) != 0 {
            return Err(LatticeError::Parity { x: v1, height: v2 });
        }
        Ok(Self { start: self.start + v1, heights: self.heights.iter().map(|h| h - v2).collect() })
    }

    /// Discrete gradient map: a particle where the height steps down.
    pub fn to_particles(&self) -> ParticleConfig {
        let bits: Vec<bool> = self.heights.windows(2).map(|w| w[1] < w[0]).collect();
        ParticleConfig::from_window(self.start, &bits)
    }

    /// `ξ(x) <= other(x)` for every `x ∈ ℤ`.
    ///
    /// Both sides are unit-slope cones outside their windows, so comparing on
    /// the union window decides the whole line.
    pub fn le(&self, other: &Interface) -> bool {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        (a.min(c)..=b.max(d)).all(|x| self.get(x) <= other.get(x))
    }

    /// First site where `self > other`, if any.
    pub fn first_excess(&self, other: &Interface) -> Option<i64> {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        (a.min(c)..=b.max(d)).find(|&x| self.get(x) > other.get(x))
    }

    /// Local extremum test used by the corner-flip dynamics.
    pub fn is_corner(&self, x: i64) -> bool {
        self.get(x - 1) == self.get(x + 1)
    }
}

/// Nondecreasing (in cone order) sequence of vertices with jump times.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexPath {
    initial: Vertex,
    events: Vec<(f64, Vertex)>,
}

impl VertexPath {
    pub fn constant(v: Vertex) -> Self {
        Self { initial: v, events: Vec::new() }
    }

    pub fn push(&mut self, t: f64, v: Vertex) -> Result<(), LatticeError> {
        if !v.is_admissible() {
            return Err(LatticeError::BadVertex { v1: v.v1, v2: v.v2 });
        }
        if let Some(&(prev, _)) = self.events.last() {
            if t <= prev {
                return Err(LatticeError::PathTime { prev, next: t });
            }
        } else if t < 0.0 {
            return Err(LatticeError::PathTime { prev: 0.0, next: t });
        }
        if !self.last().cone_le(&v) {
            return Err(LatticeError::PathOrder);
        }
        self.events.push((t, v));
        Ok(())
    }

    pub fn initial(&self) -> Vertex {
        self.initial
    }

    pub fn events(&self) -> &[(f64, Vertex)] {
        &self.events
    }

    pub fn last(&self) -> Vertex {
        self.events.last().map(|e| e.1).unwrap_or(self.initial)
    }

    /// Right-continuous value at time `t`.
    pub fn at(&self, t: f64) -> Vertex {
        let k = self.events.partition_point(|e| e.0 <= t);
        if k == 0 {
            self.initial
        } else {
            self.events[k - 1].1
        }
    }
}
