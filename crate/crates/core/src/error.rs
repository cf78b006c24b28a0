use thiserror::Error;

use crate::equilibria::WellSide;

/// Errors produced by the model, integrator and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DickeError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("state lies outside the atomic disk (Q^2 + P^2 = {radius_sq})")]
    OutsideDisk { radius_sq: f64 },

    #[error("flow is singular at the disk boundary (4 - Q^2 - P^2 = {margin:e})")]
    Singular { margin: f64 },

    #[error("no real q on the energy shell E = {energy} at Q = {atom_q} (shell minimum {minimum})")]
    NoRealRoot { energy: f64, atom_q: f64, minimum: f64 },

    #[error("no {0} well exists at these parameters")]
    WellNotPresent(WellSide),

    #[error("energy {energy} lies below the bottom of the {side} well ({bottom})")]
    BelowWellBottom { energy: f64, bottom: f64, side: WellSide },

    #[error("integration failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
}

impl DickeError {
    /// Whether the error stems from the state/energy domain rather than
    /// from bad input or a numerical failure.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            DickeError::OutsideDisk { .. }
                | DickeError::Singular { .. }
                | DickeError::NoRealRoot { .. }
                | DickeError::WellNotPresent(_)
                | DickeError::BelowWellBottom { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, DickeError>;
