//! Classical (thermodynamic-limit) deformed Dicke model.
//!
//! The crate evaluates the per-particle classical Hamiltonian and its flow,
//! integrates trajectories, locates and classifies equilibria, maps the
//! `(gamma, alpha)` phase diagram with its critical deformation line and
//! excited-state critical energies, and labels trajectories as regular or
//! chaotic.

pub mod chaos;
pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod model;
pub mod ode;
pub mod phase_diagram;
pub mod shell;

pub use error::{DickeError, Result};
pub use model::{ModelParams, PhaseState};
