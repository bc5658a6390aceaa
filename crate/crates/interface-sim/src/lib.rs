//! Graphical construction of the interface dynamics.
//!
//! Corner flips are driven by independent up and down arrows at every site;
//! births and deaths come from two Poisson clocks. All randomness is keyed by
//! seed and position, so several interfaces can be run on the same
//! realization and compared event by event.

mod bundle;
mod ops;
mod paths;
mod streams;

pub use bundle::{flip, recenter, CoupledBundle, Driver, LogEntry, LogKind, Member, StepKind};
pub use ops::{
    centered_evolve, coupled_delta_sandwich, coupled_rate_ordering, evolve_with_vertex_path, harris_evolve,
    height_identity_check, sandwich_run, FaultInjection, HeightIdentityReport, OrderViolation, OrderedRun,
};
pub use paths::{paths_from_events, standard_paths, StandardPaths};
pub use streams::{ArrowStream, ClockEvent, ClockKind, KillingClocks, ARROW_RATE};

use lattice_core::Vertex;

#[derive(Debug, thiserror::Error)]
pub enum InterfaceError {
    #[error("expected an interface with vertex (0, 0), got ({}, {})", .0.v1, .0.v2)]
    NotCentered(Vertex),
    #[error("{lower} exceeds {upper} at site {site}, time {time} ({count} violations in total)")]
    OrderViolation { time: f64, site: i64, lower: String, upper: String, count: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}
