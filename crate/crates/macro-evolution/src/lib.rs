//! Grid numerics for the macroscopic delta evolutions.
//!
//! Densities are cell averages, interfaces are node values on the same grid,
//! and both are evolved with the exact Gaussian transfer weights, so the two
//! pipelines agree to rounding.

mod barrier;
mod density;
mod error;
mod evolve;
mod interface;
mod io;
pub mod kernel;

pub use barrier::{
    barrier_ladder, barrier_limit, barrier_pair, cone_margin, holder_constant, interval_distance, j_monotonicity_check,
    mass_distance, stationary_profile, BarrierLimit, BarrierPair, BarrierSummary, GapStat, LevelReport, RateComparison,
};
pub use density::{DensityClass, GridSpec, MacroDensity};
pub use error::MacroError;
pub use evolve::{
    delta_evolve, delta_interface_evolve, Barrier, DensityTrajectory, EvolveOptions, Frame, InterfaceTrajectory, Trajectory,
};
pub use interface::{density_to_interface, interface_to_density, MacroInterface};
pub use io::{write_density_csv, write_interface_csv, write_json, ProfileMeta};
