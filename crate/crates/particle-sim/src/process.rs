use lattice_core::rng::{self, role};
use lattice_core::ParticleConfig;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::SimError;

pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    /// Jump across a bond; `site` is the left end of the bond.
    Exchange,
    Birth,
    Death,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Exchange => "exchange",
            EventKind::Birth => "birth",
            EventKind::Death => "death",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub site: i64,
}

/// Gillespie engine for the particle generator.
///
/// Bonds `(x, x+1)` with `x ∈ [L-1, R]` ring at rate ½ each; every other bond
/// joins two equal sites and is a no-op. Two extra clocks of rate `J` kill the
/// rightmost particle and fill the leftmost hole. In centered mode the
/// configuration is shifted after each birth or death to keep the median at ½.
#[derive(Clone, Debug)]
pub struct ParticleProcess {
    config: ParticleConfig,
    rate: f64,
    time: f64,
    births: u64,
    deaths: u64,
    events: u64,
    event_cap: u64,
    centered: bool,
    rng: ChaCha8Rng,
}

impl ParticleProcess {
    pub fn new(config: ParticleConfig, rate: f64, seed: u64, replica: u64) -> Result<Self, SimError> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(SimError::BadRate(rate));
        }
        Ok(Self {
            config,
            rate,
            time: 0.0,
            births: 0,
            deaths: 0,
            events: 0,
            event_cap: DEFAULT_EVENT_CAP,
            centered: false,
            rng: rng::keyed(&[seed, replica, role::PARTICLE]),
        })
    }

    /// Same as [`new`](Self::new) but seen from the median, which must be ½.
    pub fn centered(config: ParticleConfig, rate: f64, seed: u64, replica: u64) -> Result<Self, SimError> {
        if config.median_floor() != 0 {
            return Err(SimError::NotCentered(config.median()));
        }
        let mut p = Self::new(config, rate, seed, replica)?;
        p.centered = true;
        Ok(p)
    }

    pub fn with_event_cap(mut self, cap: u64) -> Self {
        self.event_cap = cap;
        self
    }

    pub fn config(&self) -> &ParticleConfig {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn births(&self) -> u64 {
        self.births
    }

    pub fn deaths(&self) -> u64 {
        self.deaths
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    fn total_rate(&self) -> f64 {
        0.5 * (self.config.span() + 1) as f64 + 2.0 * self.rate
    }

    /// Runs up to time `horizon`, calling `on_event` after every state change
    /// with the holding time of the state before it. Exchange clocks that hit a
    /// pair of equal sites are not reported. The final holding interval up to
    /// `horizon` is reported through the return value.
    pub fn run_until<F>(&mut self, horizon: f64, mut on_event: F) -> Result<f64, SimError>
    where
        F: FnMut(&Event, &ParticleConfig, f64),
    {
        let mut last_change = self.time;
        loop {
            let total = self.total_rate();
            let dt = Exp::new(total).expect("positive rate").sample(&mut self.rng);
            if self.time + dt > horizon {
                self.time = horizon;
                return Ok(horizon - last_change);
            }
            self.time += dt;
            self.events += 1;
            if self.events > self.event_cap {
                return Err(SimError::EventCap { cap: self.event_cap, time: self.time });
            }
            let u = self.rng.gen::<f64>() * total;
            let (l, _) = self.config.boundaries();
            let event = if u < self.rate {
                let (_, r) = self.config.boundaries();
                self.config.death();
                self.deaths += 1;
                if self.centered {
                    self.config.shift_in_place(1);
                }
                Event { time: self.time, kind: EventKind::Death, site: r }
            } else if u < 2.0 * self.rate {
                self.config.birth();
                self.births += 1;
                if self.centered {
                    self.config.shift_in_place(-1);
                }
                Event { time: self.time, kind: EventKind::Birth, site: l }
            } else {
                let k = ((u - 2.0 * self.rate) / 0.5) as i64;
                let k = k.min(self.config.span());
                let x = l - 1 + k;
                if self.config.get(x) == self.config.get(x + 1) {
                    continue;
                }
                self.config.exchange(x);
                Event { time: self.time, kind: EventKind::Exchange, site: x }
            };
            let held = event.time - last_change;
            last_change = event.time;
            on_event(&event, &self.config, held);
        }
    }
}
