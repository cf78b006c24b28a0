use dicke_core::equilibria::{well_structure, Equilibrium};
use dicke_core::integrator::{evolve, IntegrationConfig};
use dicke_core::model::{effective_potential, PhaseState};
use dicke_core::phase_diagram::{critical_alpha, linspace, potential_map as core_potential_map};
use dicke_core::ModelParams;
use serde::Serialize;

/// Samples per unit time in [`trajectory`].
pub const SAMPLES_PER_TIME: f64 = 20.0;
/// Longest orbit the page may request.
pub const MAX_T_END: f64 = 2000.0;
pub const MAX_RESOLUTION: usize = 801;

fn params(gamma: f64, alpha: f64) -> Result<ModelParams, String> {
    ModelParams::resonant(gamma, alpha).map_err(|e| e.to_string())
}

pub fn potential_map(gamma: f64, alpha: f64, resolution: usize) -> Result<Vec<f64>, String> {
    if resolution > MAX_RESOLUTION {
        return Err(format!("resolution {resolution} exceeds {MAX_RESOLUTION}"));
    }
    core_potential_map(&params(gamma, alpha)?, resolution).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct Point {
    #[serde(rename = "Q")]
    atom_q: f64,
    q: f64,
    energy: f64,
}

impl From<&Equilibrium> for Point {
    fn from(e: &Equilibrium) -> Self {
        Self { atom_q: e.state.atom_q, q: e.state.field_q, energy: e.energy }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    minima: Vec<Point>,
    saddle: Option<Point>,
    ground_energy: f64,
    alpha_c: Option<f64>,
}

pub fn well_summary(gamma: f64, alpha: f64) -> Result<String, String> {
    let p = params(gamma, alpha)?;
    let ws = well_structure(&p);
    let summary = Summary {
        minima: ws.minima.iter().map(Point::from).collect(),
        saddle: ws.saddle.as_ref().map(Point::from),
        ground_energy: ws.ground.energy,
        alpha_c: critical_alpha(&p, gamma),
    };
    serde_json::to_string(&summary).map_err(|e| e.to_string())
}

/// State at `(Q, P)` whose energy is `V(Q, P) + excess`.
pub fn launch_state(p: &ModelParams, atom_q: f64, atom_p: f64, excess: f64) -> Result<PhaseState, String> {
    if !(excess >= 0.0) {
        return Err(format!("excess energy must be >= 0, got {excess}"));
    }
    let fm = effective_potential(p, atom_q, atom_p).map_err(|e| e.to_string())?;
    // H = V + (w/2)((q - q*)^2 + p^2) at fixed (Q, P)
    let field_p = (2.0 * excess * p.omega0() / p.omega()).sqrt();
    Ok(PhaseState::new(fm.field_q, field_p, atom_q, atom_p))
}

pub fn trajectory(gamma: f64, alpha: f64, atom_q: f64, atom_p: f64, excess: f64, t_end: f64) -> Result<Vec<f64>, String> {
    if !(t_end > 0.0 && t_end <= MAX_T_END) {
        return Err(format!("t_end must lie in (0, {MAX_T_END}], got {t_end}"));
    }
    let p = params(gamma, alpha)?;
    let s0 = launch_state(&p, atom_q, atom_p, excess)?;
    let cfg = IntegrationConfig { t_end, sample_dt: 1.0 / SAMPLES_PER_TIME, ..Default::default() };
    let tr = evolve(&p, s0, &cfg).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(tr.len() * 6);
    for (s, e) in tr.samples.iter().zip(&tr.energies) {
        out.extend_from_slice(&[s.t, s.state.field_q, s.state.field_p, s.state.atom_q, s.state.atom_p, *e]);
    }
    Ok(out)
}

pub fn critical_line(gamma_lo: f64, gamma_hi: f64, count: usize) -> Result<Vec<f64>, String> {
    if !(gamma_lo < gamma_hi) || count < 2 || count > 1000 {
        return Err("need gamma_lo < gamma_hi and 2 <= count <= 1000".into());
    }
    let base = params(0.0, 0.0)?;
    Ok(linspace(gamma_lo, gamma_hi, count)
        .into_iter()
        .flat_map(|g| [g, critical_alpha(&base, g).unwrap_or(f64::NAN)])
        .collect())
}
