//! The harness process: neighbour averaging on `ℤ` with the heights held
//! above a cone whose vertex rises at constant speed.

mod rescaled;
mod state;

pub use rescaled::{rescaled_harness, RescaledHarness, MAX_STEPS};
pub use state::{
    delta_harness_evolve, delta_harness_sandwich, harness_evolve, traveling_wave, write_harness_csv, DeltaSide,
    HarnessState, SandwichReport,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("height {value} at site {x} is below the cone |x| + {offset}")]
    BelowCone { x: i64, value: f64, offset: f64 },
    #[error("sandwich broken at step {step}, site {x}: {what}")]
    Sandwich { step: u64, x: i64, what: &'static str },
    #[error("{0} steps requested, more than the supported maximum")]
    TooManySteps(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
