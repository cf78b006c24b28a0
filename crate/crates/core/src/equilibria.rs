//! Fixed points of the flow, their stability, the ground state and the
//! energy-well structure.
//!
//! Every fixed point has `p = P = 0` and `q` slaved to `Q` through
//! `q*(Q) = -(gamma Q sqrt(4 - Q^2) + sqrt(2 omega0) alpha) / omega`, so the
//! search reduces to the roots of `dV/dQ` along the `P = 0` line, where `V` is
//! the effective potential.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{effective_potential_unchecked, field_drive, jacobian, ModelParams, PhaseState};

/// Uniform bracketing samples on `(-2, 2)`.
pub const SCAN_SAMPLES: usize = 100_001;
/// Distance kept from the disk edge by the scan.
pub const SCAN_EDGE_MARGIN: f64 = 1e-9;
/// Roots closer than this in `Q` are merged.
pub const ROOT_MERGE_TOLERANCE: f64 = 1e-8;
/// Linearization eigenvalues with `|Re|` below this count as purely imaginary.
pub const CENTER_TOLERANCE: f64 = 1e-8;
/// Minima whose energies agree to this level are reported as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationaryKind {
    Minimum,
    Saddle,
    Maximum,
}

impl fmt::Display for StationaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StationaryKind::Minimum => "minimum",
            StationaryKind::Saddle => "saddle",
            StationaryKind::Maximum => "maximum",
        })
    }
}

/// Side of the atomic disk: `Left` is `Q < 0`, `Right` is `Q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WellSide {
    Left,
    Right,
    Center,
}

impl WellSide {
    pub fn of(atom_q: f64) -> Self {
        if atom_q.abs() < ROOT_MERGE_TOLERANCE {
            WellSide::Center
        } else if atom_q < 0.0 {
            WellSide::Left
        } else {
            WellSide::Right
        }
    }
}

impl fmt::Display for WellSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WellSide::Left => "left",
            WellSide::Right => "right",
            WellSide::Center => "center",
        })
    }
}

impl std::str::FromStr for WellSide {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(WellSide::Left),
            "right" => Ok(WellSide::Right),
            "center" => Ok(WellSide::Center),
            other => Err(format!("unknown well '{other}' (expected left, right or center)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub state: PhaseState,
    pub energy: f64,
    pub kind: StationaryKind,
    pub stable: bool,
    pub well: WellSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub equilibrium: Equilibrium,
    /// Another minimum shares the ground energy (the `alpha = 0` superradiant case).
    pub degenerate: bool,
    /// The other degenerate minimum, when there is one.
    pub partner: Option<Equilibrium>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellStructure {
    /// Minima ordered by `Q`.
    pub minima: Vec<Equilibrium>,
    /// Barrier between the two wells.
    pub saddle: Option<Equilibrium>,
    pub ground: Equilibrium,
    pub esqpt_energy: Option<f64>,
    pub second_well_energy: Option<f64>,
}

impl WellStructure {
    pub fn well_count(&self) -> usize {
        self.minima.len()
    }

    pub fn minimum_on(&self, side: WellSide) -> Option<&Equilibrium> {
        self.minima.iter().find(|m| m.well == side)
    }
}

/// `dV/dQ` along `P = 0`.
fn reduced_gradient(params: &ModelParams, aq: f64) -> f64 {
    let s2 = 4.0 - aq * aq;
    let s = s2.sqrt();
    let a = field_drive(params, aq, 0.0);
    aq - params.gamma() * a * (4.0 - 2.0 * aq * aq) / (params.omega() * s)
}

/// `d^2 V / dP^2` at `P = 0`.
fn transverse_curvature(params: &ModelParams, aq: f64) -> f64 {
    let s = (4.0 - aq * aq).sqrt();
    1.0 + field_drive(params, aq, 0.0) * params.gamma() * aq / (params.omega() * s)
}

fn bisect(params: &ModelParams, mut lo: f64, mut hi: f64, mut g_lo: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = reduced_gradient(params, mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let g_lo_abs = reduced_gradient(params, lo).abs();
    let g_hi_abs = reduced_gradient(params, hi).abs();
    if g_lo_abs <= g_hi_abs {
        lo
    } else {
        hi
    }
}

fn root_positions(params: &ModelParams) -> Vec<f64> {
    let lo = -2.0 + SCAN_EDGE_MARGIN;
    let hi = 2.0 - SCAN_EDGE_MARGIN;
    let step = (hi - lo) / (SCAN_SAMPLES - 1) as f64;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_g = reduced_gradient(params, lo);
    if prev_g == 0.0 {
        roots.push(lo);
    }
    for i in 1..SCAN_SAMPLES {
        let x = if i == SCAN_SAMPLES - 1 { hi } else { lo + i as f64 * step };
        let g = reduced_gradient(params, x);
        if g == 0.0 {
            roots.push(x);
        } else if prev_g != 0.0 && (g < 0.0) != (prev_g < 0.0) {
            roots.push(bisect(params, prev_x, x, prev_g));
        }
        prev_x = x;
        prev_g = g;
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < ROOT_MERGE_TOLERANCE);
    roots
}

/// Real parts of the eigenvalues of the linearized flow at a fixed point.
///
/// At `p = P = 0` positions feed only momenta and vice versa, so the 4x4
/// linearization squares to the 2x2 block product `B C`; its eigenvalues are
/// `+-sqrt(mu)` for each eigenvalue `mu` of `B C`.
pub fn linearization_real_parts(params: &ModelParams, state: PhaseState) -> Option<[f64; 4]> {
    let j = jacobian(params, state).ok()?;
    // x' = B y with x = (q, Q), y = (p, P); y' = C x
    let b = [[j[0][1], j[0][3]], [j[2][1], j[2][3]]];
    let c = [[j[1][0], j[1][2]], [j[3][0], j[3][2]]];
    let bc = [
        [b[0][0] * c[0][0] + b[0][1] * c[1][0], b[0][0] * c[0][1] + b[0][1] * c[1][1]],
        [b[1][0] * c[0][0] + b[1][1] * c[1][0], b[1][0] * c[0][1] + b[1][1] * c[1][1]],
    ];
    let tr = bc[0][0] + bc[1][1];
    let det = bc[0][0] * bc[1][1] - bc[0][1] * bc[1][0];
    let disc = tr * tr - 4.0 * det;
    let sqrt_re = |re: f64, im: f64| (0.5 * (re.hypot(im) + re)).max(0.0).sqrt();
    let (r1, r2) = if disc >= 0.0 {
        let root = disc.sqrt();
        (sqrt_re(0.5 * (tr + root), 0.0), sqrt_re(0.5 * (tr - root), 0.0))
    } else {
        let im = 0.5 * (-disc).sqrt();
        (sqrt_re(0.5 * tr, im), sqrt_re(0.5 * tr, -im))
    };
    Some([r1, -r1, r2, -r2])
}

fn is_center(params: &ModelParams, state: PhaseState) -> bool {
    linearization_real_parts(params, state).is_some_and(|re| re.iter().all(|r| r.abs() < CENTER_TOLERANCE))
}

fn classify(params: &ModelParams, aq: f64) -> Equilibrium {
    let fm = effective_potential_unchecked(params, aq, 0.0);
    let state = PhaseState::new(fm.field_q, 0.0, aq, 0.0);
    let delta = 1e-7 * aq.abs().max(1.0);
    let along_q_min = reduced_gradient(params, aq - delta) < 0.0 && reduced_gradient(params, aq + delta) > 0.0;
    let along_q_max = reduced_gradient(params, aq - delta) > 0.0 && reduced_gradient(params, aq + delta) < 0.0;
    let vpp = transverse_curvature(params, aq);
    let kind = if along_q_min && vpp > 0.0 {
        StationaryKind::Minimum
    } else if along_q_max && vpp < 0.0 {
        StationaryKind::Maximum
    } else {
        StationaryKind::Saddle
    };
    // an energy minimum is Lyapunov stable; the eigenvalue test covers the rest
    let stable = kind == StationaryKind::Minimum || is_center(params, state);
    Equilibrium { state, energy: fm.value, kind, stable, well: WellSide::of(aq) }
}

/// All fixed points of the flow inside the disk, ordered by `Q`.
pub fn find_equilibria(params: &ModelParams) -> Vec<Equilibrium> {
    root_positions(params).into_iter().map(|aq| classify(params, aq)).collect()
}

fn ground_from(all: &[Equilibrium]) -> GroundState {
    let mut minima: Vec<Equilibrium> = all.iter().copied().filter(|e| e.kind == StationaryKind::Minimum).collect();
    if minima.is_empty() {
        minima = all.to_vec();
    }
    minima.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let best = minima[0];
    let tied: Vec<Equilibrium> =
        minima.iter().copied().filter(|m| (m.energy - best.energy).abs() <= DEGENERACY_TOLERANCE).collect();
    if tied.len() >= 2 {
        let mut tied = tied;
        // Q > 0 representative first
        tied.sort_by(|a, b| b.state.atom_q.total_cmp(&a.state.atom_q));
        GroundState { equilibrium: tied[0], degenerate: true, partner: Some(tied[1]) }
    } else {
        GroundState { equilibrium: best, degenerate: false, partner: None }
    }
}

/// Least-energy minimum of the effective potential.
pub fn ground_state(params: &ModelParams) -> GroundState {
    ground_from(&find_equilibria(params))
}

pub fn well_structure(params: &ModelParams) -> WellStructure {
    let all = find_equilibria(params);
    let ground = ground_from(&all).equilibrium;
    let minima: Vec<Equilibrium> = all.iter().copied().filter(|e| e.kind == StationaryKind::Minimum).collect();
    let (saddle, second) = if minima.len() == 2 {
        let (lo, hi) = (minima[0].state.atom_q, minima[1].state.atom_q);
        let saddle = all
            .iter()
            .copied()
            .filter(|e| e.kind == StationaryKind::Saddle && e.state.atom_q > lo && e.state.atom_q < hi)
            .min_by(|a, b| a.energy.total_cmp(&b.energy));
        let second = minima.iter().map(|m| m.energy).fold(f64::NEG_INFINITY, f64::max);
        (saddle, Some(second))
    } else {
        (None, None)
    };
    WellStructure {
        minima,
        esqpt_energy: saddle.map(|s| s.energy),
        saddle,
        ground,
        second_well_energy: second,
    }
}

/// Number of wells (minima of the effective potential).
pub fn well_count(params: &ModelParams) -> usize {
    find_equilibria(params).iter().filter(|e| e.kind == StationaryKind::Minimum).count()
}
