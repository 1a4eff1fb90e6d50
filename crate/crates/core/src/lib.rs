//! Simulation of a controlled-phase-flip gate between ions in high-Q cavities,
//! mediated by a single-photon pulse.
//!
//! The crate covers the single-excitation reflection dynamics of one
//! ion-cavity system ([`dynamics`]), the per-mode reflection it induces
//! ([`scattering`]), the resulting atom-photon gate fidelity ([`fidelity`]),
//! and the composition of three reflections into a two-ion gate ([`gate`]).

pub mod dynamics;
pub mod error;
pub mod fidelity;
pub mod gate;
pub mod model;
pub mod params;
pub mod pulse;
mod quad;
pub mod scattering;
pub mod simulation;

pub use error::{Error, Result};
pub use model::{ModeGrid, PhysicalConstants, PhysicalParams, PulseSpec};
pub use simulation::ReflectionRun;
