//! Simulator for a two-level giant atom coupled to two finite
//! Su-Schrieffer-Heeger chains in the single-excitation sector.
//!
//! * [`model`]: parameters and the exact `(4N + 1)`-dimensional Hamiltonian
//! * [`spectral`]: exact diagonalization and zero-mode tracking
//! * [`effective`]: analytic edge states, the five-state reduction and its
//!   dark state
//! * [`adiabatic`]: the adiabaticity parameter of the zero-energy passage
//! * [`dynamics`]: evolution under the sweep `θ(t) = Ωt` and transfer fidelity
//! * [`disorder`]: seeded static disorder and ensemble statistics
//! * [`experiments`]: named, configurable runs producing result tables

pub mod adiabatic;
pub mod disorder;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod experiments;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
