use std::collections::VecDeque;

/// Occupation configuration on ℤ with ones far left and zeros far right.
///
/// Stored in canonical form: the window runs from the leftmost hole `L` to the
/// rightmost particle `R`, so the first stored site is empty and the last is
/// occupied. Everything left of the window is occupied, everything right is
/// empty. A pure step `1{x < s}` has an empty window anchored at `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParticleConfig {
    start: i64,
    occ: VecDeque<bool>,
}

impl ParticleConfig {
    /// The step configuration `1{x < s}`.
    pub fn heaviside(s: i64) -> Self {
        Self { start: s, occ: VecDeque::new() }
    }

    /// Builds `η` from an arbitrary window: `η(x) = 1` for `x < start`,
    /// `bits[x - start]` inside, `0` beyond. The result is canonicalized.
    pub fn from_window(start: i64, bits: &[bool]) -> Self {
        let mut c = Self { start, occ: bits.iter().copied().collect() };
        c.trim();
        c
    }

    /// `1{x <= left_edge}` plus extra particles at the given sites.
    pub fn step_with_particles(left_edge: i64, sites: &[i64]) -> Self {
        let mut c = Self::heaviside(left_edge + 1);
        for &x in sites {
            c.set(x, true);
        }
        c
    }

    pub fn is_heaviside(&self) -> bool {
        self.occ.is_empty()
    }

    /// First site of the window; equals `L(η)`.
    pub fn window_start(&self) -> i64 {
        self.start
    }

    /// Occupancy over `[L, R]` (empty for a step).
    pub fn window(&self) -> impl Iterator<Item = bool> + '_ {
        self.occ.iter().copied()
    }

    pub fn width(&self) -> usize {
        self.occ.len()
    }

    pub fn get(&self, x: i64) -> bool {
        if x < self.start {
            true
        } else {
            let i = (x - self.start) as usize;
            i < self.occ.len() && self.occ[i]
        }
    }

    /// Sets `η(x)` and restores canonical form.
    pub fn set(&mut self, x: i64, value: bool) {
        if self.get(x) == value {
            return;
        }
        while x < self.start {
            self.start -= 1;
            self.occ.push_front(true);
        }
        let i = (x - self.start) as usize;
        if i >= self.occ.len() {
            self.occ.resize(i + 1, false);
        }
        self.occ[i] = value;
        self.trim();
    }

    fn trim(&mut self) {
        while self.occ.front() == Some(&true) {
            self.occ.pop_front();
            self.start += 1;
        }
        while self.occ.back() == Some(&false) {
            self.occ.pop_back();
        }
    }

    /// `(L, R)`: leftmost hole and rightmost particle. A step `1{x < s}` gives `(s, s - 1)`.
    pub fn boundaries(&self) -> (i64, i64) {
        (self.start, self.start + self.occ.len() as i64 - 1)
    }

    /// `R - L + 1`; zero exactly for a step.
    pub fn span(&self) -> i64 {
        self.occ.len() as i64
    }

    pub fn particles_in_window(&self) -> i64 {
        self.occ.iter().filter(|&&b| b).count() as i64
    }

    /// Lower neighbour of the median: the median is `median_floor() + 1/2`.
    ///
    /// Scanning right from `L - 1/2`, the surplus of particles to the right
    /// over holes to the left starts at the window's particle count and drops
    /// by exactly one per site, so the balance point is reached after that many sites.
    pub fn median_floor(&self) -> i64 {
        self.start - 1 + self.particles_in_window()
    }

    pub fn median(&self) -> f64 {
        self.median_floor() as f64 + 0.5
    }

    /// Number of pairs `x < y` with a hole at `x` and a particle at `y`.
    pub fn psi(&self) -> u64 {
        let mut holes = 0u64;
        let mut total = 0u64;
        for b in self.window() {
            if b {
                total += holes;
            } else {
                holes += 1;
            }
        }
        total
    }

    /// Number of triples `x < y < z` of hole, hole, particle.
    pub fn psi2(&self) -> u64 {
        let mut holes = 0u64;
        let mut total = 0u64;
        for b in self.window() {
            if b {
                total += holes * holes.saturating_sub(1) / 2;
            } else {
                holes += 1;
            }
        }
        total
    }

    /// `(N0, N1)`: holes left of `R`, particles right of `L`.
    pub fn hole_particle_counts(&self) -> (u64, u64) {
        let n1 = self.particles_in_window() as u64;
        (self.occ.len() as u64 - n1, n1)
    }

    /// Shift by `k`: `(θ_k η)(x) = η(x - k)`.
    pub fn shifted(&self, k: i64) -> Self {
        Self { start: self.start + k, occ: self.occ.clone() }
    }

    pub fn shift_in_place(&mut self, k: i64) {
        self.start += k;
    }

    /// Position of the `a`-th leftmost hole and of the `b`-th rightmost particle.
    pub fn micro_quantiles(&self, a: u64, b: u64) -> (i64, i64) {
        (self.nth_hole_from_left(a), self.nth_particle_from_right(b))
    }

    fn nth_hole_from_left(&self, a: u64) -> i64 {
        assert!(a >= 1, "quantile index starts at 1");
        let mut seen = 0u64;
        for (i, b) in self.occ.iter().enumerate() {
            if !b {
                seen += 1;
                if seen == a {
                    return self.start + i as i64;
                }
            }
        }
        let (_, r) = self.boundaries();
        r + (a - seen) as i64
    }

    fn nth_particle_from_right(&self, b: u64) -> i64 {
        assert!(b >= 1, "quantile index starts at 1");
        let mut seen = 0u64;
        for (i, bit) in self.occ.iter().enumerate().rev() {
            if *bit {
                seen += 1;
                if seen == b {
                    return self.start + i as i64;
                }
            }
        }
        self.start - (b - seen) as i64
    }

    /// Removes the `b` rightmost particles and fills the `a` leftmost holes.
    pub fn gamma_micro(&self, a: u64, b: u64) -> Self {
        let mut out = self.clone();
        if b > 0 {
            let rb = self.nth_particle_from_right(b);
            let (_, r) = self.boundaries();
            for x in rb..=r.max(rb) {
                if self.get(x) {
                    out.set(x, false);
                }
            }
        }
        if a > 0 {
            let la = self.nth_hole_from_left(a);
            let (l, _) = self.boundaries();
            for x in l.min(la)..=la {
                if !self.get(x) {
                    out.set(x, true);
                }
            }
        }
        out
    }

    /// Exchange across the bond `(x, x + 1)`.
    pub fn exchange(&mut self, x: i64) {
        let (a, b) = (self.get(x), self.get(x + 1));
        if a != b {
            self.set(x, b);
            self.set(x + 1, a);
        }
    }

    /// Creates a particle at the leftmost hole.
    pub fn birth(&mut self) {
        let l = self.start;
        self.set(l, true);
    }

    /// Removes the rightmost particle.
    pub fn death(&mut self) {
        let (_, r) = self.boundaries();
        self.set(r, false);
    }

    /// Number of particles at sites `>= x`.
    pub fn particles_from(&self, x: i64) -> u64 {
        let (l, r) = self.boundaries();
        if x > r {
            return 0;
        }
        let inside = self
            .occ
            .iter()
            .enumerate()
            .filter(|&(i, &b)| b && self.start + i as i64 >= x)
            .count() as u64;
        inside + if x < l { (l - x) as u64 } else { 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ParticleConfig {
        // 1{x <= -1} plus a particle at 2
        ParticleConfig::step_with_particles(-1, &[2])
    }

    #[test]
    fn boundaries_of_step_and_example() {
        assert_eq!(ParticleConfig::heaviside(1).boundaries(), (1, 0));
        assert_eq!(example().boundaries(), (0, 2));
        let bits = [false, true, true, false, false, true, false, true, false, false, true];
        let c = ParticleConfig::from_window(-4, &bits);
        assert_eq!(c.boundaries(), (-4, 6));
    }

    fn brute_median(c: &ParticleConfig) -> f64 {
        let (l, r) = c.boundaries();
        for k in (l - 2)..=(r + 2) {
            let right = ((k + 1)..=(r + 1)).filter(|&x| c.get(x)).count();
            let left = ((l - 1)..=k).filter(|&x| !c.get(x)).count();
            if right == left {
                return k as f64 + 0.5;
            }
        }
        panic!("no median found");
    }

    #[test]
    fn median_examples() {
        assert_eq!(ParticleConfig::heaviside(1).median(), 0.5);
        assert_eq!(example().median(), 0.5);
        assert_eq!(brute_median(&example()), 0.5);
        assert_eq!(example().shifted(3).median(), 3.5);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(ParticleConfig::heaviside(1).psi(), 0);
        assert_eq!(example().psi(), 2);
        let mut c = ParticleConfig::heaviside(1);
        c.exchange(0);
        assert_eq!(c.psi(), 1);
    }

    #[test]
    fn psi2_examples() {
        assert_eq!(ParticleConfig::heaviside(1).psi2(), 0);
        assert_eq!(example().psi2(), 1);
        assert_eq!(ParticleConfig::step_with_particles(-1, &[3]).psi2(), 3);
    }

    #[test]
    fn counts_examples() {
        assert_eq!(ParticleConfig::heaviside(0).hole_particle_counts(), (0, 0));
        assert_eq!(ParticleConfig::heaviside(0).span(), 0);
        assert_eq!(example().hole_particle_counts(), (2, 1));
        assert_eq!(example().span(), 3);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(example().micro_quantiles(1, 1), (0, 2));
        assert_eq!(ParticleConfig::heaviside(1).micro_quantiles(1, 1), (1, 0));
        assert_eq!(example().micro_quantiles(1, 2).1, -1);
        assert_eq!(example().micro_quantiles(3, 1).0, 3);
    }

    #[test]
    fn gamma_micro_examples() {
        assert_eq!(example().gamma_micro(1, 1), ParticleConfig::heaviside(1));
        assert_eq!(example().gamma_micro(0, 0), example());
        let h = ParticleConfig::heaviside(1);
        assert_eq!(h.gamma_micro(3, 1).median(), h.median() + 2.0);
    }

    #[test]
    fn births_and_deaths_move_boundaries() {
        let mut c = example();
        c.birth();
        assert_eq!(c.boundaries(), (1, 2));
        c.death();
        assert_eq!(c, ParticleConfig::heaviside(1));
    }

    #[test]
    fn particles_from_counts_tail() {
        let c = example();
        assert_eq!(c.particles_from(3), 0);
        assert_eq!(c.particles_from(0), 1);
        assert_eq!(c.particles_from(-2), 3);
    }
}
