use lattice_core::rng::{self, role, zigzag};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Up and down arrows of rate ½ at every site, materialized per unit time cell.
///
/// The arrows of `(site, cell, direction)` come from their own keyed stream, so
/// any process that asks for them sees the same points no matter what else it
/// asked for before.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArrowStream {
    seed: u64,
}

pub const ARROW_RATE: f64 = 0.5;

fn poisson_times(rng: &mut impl Rng, mean: f64, cell: i64) -> Vec<f64> {
    let n = if mean > 0.0 { Poisson::new(mean).expect("positive mean").sample(rng) as usize } else { 0 };
    let mut ts: Vec<f64> = (0..n).map(|_| cell as f64 + rng.gen::<f64>()).collect();
    ts.sort_by(f64::total_cmp);
    ts
}

impl ArrowStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sorted arrow times at `site` inside `[cell, cell + 1)`.
    pub fn cell(&self, site: i64, cell: i64, up: bool) -> Vec<f64> {
        let mut r = rng::keyed(&[self.seed, role::ARROW, zigzag(site), zigzag(cell), up as u64]);
        poisson_times(&mut r, ARROW_RATE, cell)
    }

    /// Arrow times at `site` in the half-open interval `(s, t]`.
    pub fn between(&self, site: i64, up: bool, s: f64, t: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for c in (s.floor() as i64)..=(t.floor() as i64) {
            out.extend(self.cell(site, c, up).into_iter().filter(|&u| u > s && u <= t));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClockKind {
    /// Fill the leftmost hole: vertex moves by `(1, 1)`.
    Birth,
    /// Remove the rightmost particle: vertex moves by `(-1, 1)`.
    Death,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClockEvent {
    pub time: f64,
    pub kind: ClockKind,
    /// Uniform label in `[0, 1)` used for thinning.
    pub mark: f64,
}

/// Two independent Poisson clocks of rate `J`, with uniform marks.
///
/// Keeping only events with `mark < J'/J` gives clocks of rate `J'` that are
/// subsets of these ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KillingClocks {
    seed: u64,
    rate: f64,
}

impl KillingClocks {
    pub fn new(seed: u64, rate: f64) -> Self {
        assert!(rate >= 0.0 && rate.is_finite(), "clock rate must be finite and nonnegative");
        Self { seed, rate }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn cell(&self, kind: ClockKind, cell: i64) -> Vec<ClockEvent> {
        let r = match kind {
            ClockKind::Birth => role::CLOCK_BIRTH,
            ClockKind::Death => role::CLOCK_DEATH,
        };
        let mut g = rng::keyed(&[self.seed, r, zigzag(cell)]);
        let times = poisson_times(&mut g, self.rate, cell);
        times.into_iter().map(|time| ClockEvent { time, kind, mark: g.gen() }).collect()
    }

    /// All events in `(s, t]`, sorted by time.
    pub fn between(&self, s: f64, t: f64) -> Vec<ClockEvent> {
        let mut out = Vec::new();
        if self.rate == 0.0 || t <= s {
            return out;
        }
        for c in (s.floor() as i64)..=(t.floor() as i64) {
            for kind in [ClockKind::Birth, ClockKind::Death] {
                out.extend(self.cell(kind, c).into_iter().filter(|e| e.time > s && e.time <= t));
            }
        }
        out.sort_by(|a, b| a.time.total_cmp(&b.time));
        out
    }

    /// Events in `(s, t]` surviving thinning to rate `rate`.
    pub fn thinned_between(&self, rate: f64, s: f64, t: f64) -> Vec<ClockEvent> {
        let keep = if self.rate > 0.0 { rate / self.rate } else { 0.0 };
        self.between(s, t).into_iter().filter(|e| e.mark < keep).collect()
    }
}
