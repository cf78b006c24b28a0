//! Initial conditions of the form `(q, 0, Q, 0)` on a prescribed energy shell.
//!
//! At `p = P = 0` the Hamiltonian is a quadratic in `q`:
//! `(omega/2 omega0) q^2 + A q + (Q^2/2 - 1 - E) = 0` with `A` the field drive
//! at `(Q, 0)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equilibria::{well_structure, WellSide};
use crate::error::{DickeError, Result};
use crate::model::{energy_unchecked, field_drive, ModelParams, PhaseState, BOUNDARY_TOLERANCE};

/// Root selector for the shell quadratic; `Plus` is the larger root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(format!("unknown branch '{other}' (expected plus or minus)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellRequest {
    pub params: ModelParams,
    pub energy: f64,
    pub atom_q: f64,
    pub branch: Branch,
}

/// Both roots of the shell quadratic, `plus >= minus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellRoots {
    pub plus: f64,
    pub minus: f64,
}

fn polish(params: &ModelParams, energy: f64, atom_q: f64, mut q: f64, drive: f64) -> f64 {
    let w = params.omega() / params.omega0();
    for _ in 0..4 {
        let r = energy_unchecked(params, &[q, 0.0, atom_q, 0.0]) - energy;
        let d = w * q + drive;
        if r == 0.0 || d.abs() < 1e-300 {
            break;
        }
        let next = q - r / d;
        let r_next = energy_unchecked(params, &[next, 0.0, atom_q, 0.0]) - energy;
        if r_next.abs() >= r.abs() {
            break;
        }
        q = next;
    }
    q
}

/// Solves for both `q` roots at `(Q, P) = (atom_q, 0)`.
pub fn shell_roots(params: &ModelParams, energy: f64, atom_q: f64) -> Result<ShellRoots> {
    let s = PhaseState::new(0.0, 0.0, atom_q, 0.0).validated(BOUNDARY_TOLERANCE)?;
    let aq = s.atom_q;
    if !energy.is_finite() {
        return Err(DickeError::InvalidConfig(format!("energy must be finite, got {energy}")));
    }
    let a = 0.5 * params.omega() / params.omega0();
    let b = field_drive(params, aq, 0.0);
    let c = 0.5 * aq * aq - 1.0 - energy;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // the vertex of the parabola is the effective potential at (Q, 0)
        let minimum = 0.5 * aq * aq - 1.0 - b * b / (4.0 * a);
        return Err(DickeError::NoRealRoot { energy, atom_q: aq, minimum });
    }
    let root = disc.sqrt();
    // cancellation-free pair
    let t = -0.5 * (b + b.signum() * root);
    let (r1, r2) = if t == 0.0 { (0.0, 0.0) } else { (t / a, c / t) };
    let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    let plus = polish(params, energy, aq, hi, b);
    let minus = polish(params, energy, aq, lo, b);
    Ok(ShellRoots { plus: plus.max(minus), minus: minus.min(plus) })
}

pub fn solve_q_on_shell(req: &ShellRequest) -> Result<PhaseState> {
    let roots = shell_roots(&req.params, req.energy, req.atom_q)?;
    let q = match req.branch {
        Branch::Plus => roots.plus,
        Branch::Minus => roots.minus,
    };
    Ok(PhaseState::new(q, 0.0, req.atom_q, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellInitialCondition {
    pub state: PhaseState,
    pub branch: Branch,
    /// The energy is above the barrier, so the two wells are connected.
    pub ambiguous: bool,
}

/// Initial condition on the shell `E` inside the requested well, taken at
/// the `Q` of that well's minimum.
pub fn in_well_ic(params: &ModelParams, energy: f64, well: WellSide) -> Result<WellInitialCondition> {
    let ws = well_structure(params);
    let min = *ws.minimum_on(well).ok_or(DickeError::WellNotPresent(well))?;
    if energy < min.energy {
        return Err(DickeError::BelowWellBottom { energy, bottom: min.energy, side: well });
    }
    let roots = shell_roots(params, energy, min.state.atom_q)?;
    let branch = match ws.saddle {
        Some(saddle) => {
            let sq = saddle.state.field_q;
            if (roots.plus - sq).abs() >= (roots.minus - sq).abs() {
                Branch::Plus
            } else {
                Branch::Minus
            }
        }
        None => Branch::Plus,
    };
    let q = match branch {
        Branch::Plus => roots.plus,
        Branch::Minus => roots.minus,
    };
    let ambiguous = ws.esqpt_energy.is_some_and(|e| energy > e);
    Ok(WellInitialCondition { state: PhaseState::new(q, 0.0, min.state.atom_q, 0.0), branch, ambiguous })
}
