//! Numerical laboratory for enstrophy defects of 2D incompressible flow.
//!
//! The crate is organized around the chain
//!
//!   vorticity field  ->  velocity (Biot-Savart)  ->  defect densities
//!
//! with the function-space diagnostics (Lorentz, Orlicz/Zygmund, Besov) that
//! classify how singular the fields are allowed to be. `fields` holds grids,
//! radial profiles and spectral transforms; `quad` the 1D quadrature engine
//! used by every radial reduction; `biotsavart` the velocity reconstructions;
//! `funcspaces` the rearrangement-invariant norms; `defects` the transport
//! and viscous enstrophy defects; `examples` the concrete vorticities and
//! experiment drivers.

pub mod biotsavart;
pub mod defects;
pub mod error;
pub mod examples;
pub mod fields;
pub mod funcspaces;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
