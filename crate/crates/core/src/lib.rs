//! Quantum-emitter electrodynamics on Yee lattices.
//!
//! Evolves a two-level emitter coupled to open, dispersive environments with
//! a complex-valued FDTD scheme: an auxiliary grid carries the emitter's
//! free-space self-field, a total-field/scattered-field surface hands it to
//! the main grid, and the emitter amplitude is driven by the scattered field
//! sampled back at its own position. A frequency-domain route (1D layered
//! scenes) and a 1D modal-reconstruction check of the spectral identity for
//! Im g complete the toolbox.

pub mod analysis;
pub mod boundaries;
pub mod emitter;
pub mod engine;
pub mod error;
pub mod field;
pub mod grid;
pub mod media;
pub mod modes1d;
// pub mod output;
// pub mod plot;
// pub mod runner;
// pub mod scenario;
pub mod spectral;
pub mod tfsf;
pub mod tmm;

pub use error::{Error, Result};
