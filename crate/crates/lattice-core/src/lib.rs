//! Exact integer-lattice types for the exclusion process with free boundaries.
//!
//! A [`ParticleConfig`] is a finite perturbation of a step configuration
//! (ones far left, zeros far right). An [`Interface`] is a ±1-slope height
//! function that equals a cone `|x - v1| + v2` outside a finite window. The
//! two are linked by the discrete-gradient map [`Interface::to_particles`].

mod error;
mod interface;
mod particles;
pub mod rng;
mod text;

pub use error::LatticeError;
pub use interface::{Interface, Vertex, VertexPath};
pub use particles::ParticleConfig;
