//! Figure recipes: the caption parameter sets, their data tables and a
//! machine-readable verdict for each panel.

use std::fmt;
use std::str::FromStr;

use dicke_core::chaos::{lyapunov_max, LyapunovConfig};
use dicke_core::equilibria::{ground_state, well_count, WellSide};
use dicke_core::integrator::{evolve, IntegrationConfig, Trajectory};
use dicke_core::model::{hamiltonian, PhaseState};
use dicke_core::phase_diagram::{
    accessible_region, classify_grid, critical_alpha, ground_state_sweep, GridAxis, SweepAxis, SweepRow, SweepSpec,
};
use dicke_core::ModelParams;
use serde::Serialize;
use serde_json::Value;

use crate::commands::{grid_table, sweep_table};
use crate::error::CliError;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Panels c through n of the ground-state figure.
    Fig1(char),
    Fig2,
    /// Panels a through i of the trajectory figure.
    Fig3(char),
}

impl Figure {
    pub fn all() -> Vec<Figure> {
        let mut v: Vec<Figure> = ('c'..='n').map(Figure::Fig1).collect();
        v.push(Figure::Fig2);
        v.extend(('a'..='i').map(Figure::Fig3));
        v
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Figure::Fig1(c) => write!(f, "fig1{c}"),
            Figure::Fig2 => f.write_str("fig2"),
            Figure::Fig3(c) => write!(f, "fig3{c}"),
        }
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("unknown figure '{s}' (expected fig1c..fig1n, fig2 or fig3a..fig3i)");
        if s == "fig2" {
            return Ok(Figure::Fig2);
        }
        let mut chars = s.strip_prefix("fig").ok_or_else(bad)?.chars();
        let (Some(n), Some(panel), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(bad());
        };
        match n {
            '1' if ('c'..='n').contains(&panel) => Ok(Figure::Fig1(panel)),
            '3' if ('a'..='i').contains(&panel) => Ok(Figure::Fig3(panel)),
            _ => Err(bad()),
        }
    }
}

/// Output of one recipe: named tables plus the verdict block.
#[derive(Debug, Clone)]
pub struct Reproduction {
    pub figure: Figure,
    pub tables: Vec<(String, Table)>,
    pub verdict: Value,
}

pub fn reproduce(figure: Figure) -> Result<Reproduction, CliError> {
    match figure {
        Figure::Fig1(panel) => fig1(panel),
        Figure::Fig2 => fig2(),
        Figure::Fig3(panel) => fig3(panel),
    }
}

const GAMMA: f64 = 1.5;
/// Tolerance for the trajectory panels: tight enough to hold the energy to
/// 1e-8 over the whole record.
pub const FIG3_TOLERANCE: f64 = 1e-13;

/// `(panel, alpha, caption energy, caption initial state)` at gamma = 1.5.
pub const FIG3_CASES: [(char, f64, f64, [f64; 4]); 9] = [
    ('a', 0.5, -1.9993, [1.32, 0.0, -1.5, 0.0]),
    ('b', 0.5, -2.0007, [-6.736, 0.0, 1.5, 0.0]),
    ('c', 0.7, -1.4997, [2.374, 0.0, -1.0, 0.0]),
    ('d', 0.7, -1.4984, [-0.29, 0.0, 1.0, 0.0]),
    ('e', 1.1, -0.9998, [1.797, 0.0, -1.4, 0.0]),
    ('f', 1.41, -0.6830, [0.694, 0.0, -1.1, 0.0]),
    ('g', 1.43, -0.6657, [0.608, 0.0, -1.019, 0.0]),
    ('h', 1.5, -2.0001, [-1.0, 0.0, -0.201, 0.0]),
    ('i', 1.5, -12.0001, [-5.638, 0.0, 1.1, 0.0]),
];

fn resonant(gamma: f64, alpha: f64) -> Result<ModelParams, CliError> {
    Ok(ModelParams::resonant(gamma, alpha)?)
}

#[derive(Debug, Serialize)]
struct SweepVerdict {
    figure: String,
    fixed_name: &'static str,
    fixed_value: f64,
    varied: &'static str,
    lo: f64,
    hi: f64,
    points: usize,
    plotted: Vec<&'static str>,
    max_adjacent_jump_q: f64,
    #[serde(rename = "max_adjacent_jump_Q")]
    max_adjacent_jump_atom_q: f64,
    #[serde(rename = "monotone_Q")]
    monotone_atom_q: bool,
    jump_detected: bool,
    jump_location: Option<f64>,
    jump_q: Option<f64>,
    #[serde(rename = "jump_Q")]
    jump_atom_q: Option<f64>,
}

struct Jump {
    location: f64,
    dq: f64,
    d_atom_q: f64,
}

/// Shrinks the bracket around the largest adjacent jump in `Q`. A real
/// discontinuity keeps its size down to a bracket of width ~1e-12; a steep
/// but continuous section does not.
fn refine_jump(spec: &SweepSpec, rows: &[SweepRow]) -> Option<Jump> {
    let (k, initial) = rows
        .windows(2)
        .enumerate()
        .map(|(k, w)| (k, (w[1].atom_q - w[0].atom_q).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if initial < 1e-9 {
        return None;
    }
    let at = |v: f64| ground_state(&spec.params_at(v)).equilibrium.state;
    let (mut lo, mut hi) = (rows[k].varied, rows[k + 1].varied);
    let (mut s_lo, mut s_hi) = (at(lo), at(hi));
    while hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        let s_mid = at(mid);
        if (s_mid.atom_q - s_lo.atom_q).abs() >= (s_hi.atom_q - s_mid.atom_q).abs() {
            hi = mid;
            s_hi = s_mid;
        } else {
            lo = mid;
            s_lo = s_mid;
        }
    }
    let d_atom_q = s_hi.atom_q - s_lo.atom_q;
    (d_atom_q.abs() > 0.5 * initial).then(|| Jump { location: 0.5 * (lo + hi), dq: s_hi.field_q - s_lo.field_q, d_atom_q })
}

fn fig1(panel: char) -> Result<Reproduction, CliError> {
    let figure = Figure::Fig1(panel);
    let (fixed_name, fixed_value, spec) = match panel {
        'c' | 'g' | 'h' => {
            ("alpha", 0.25, SweepSpec { base: resonant(0.0, 0.25)?, varied: SweepAxis::Gamma, lo: 0.0, hi: 1.1, count: 201 })
        }
        'd' | 'i' | 'j' => {
            ("gamma", 0.1, SweepSpec { base: resonant(0.1, 0.0)?, varied: SweepAxis::Alpha, lo: -0.5, hi: 0.5, count: 201 })
        }
        'e' | 'k' | 'l' => {
            ("gamma", 0.5, SweepSpec { base: resonant(0.5, 0.0)?, varied: SweepAxis::Alpha, lo: -0.5, hi: 0.5, count: 201 })
        }
        _ => ("gamma", 1.0, SweepSpec { base: resonant(1.0, 0.0)?, varied: SweepAxis::Alpha, lo: -0.5, hi: 0.5, count: 201 }),
    };
    let plotted = match panel {
        'c' | 'd' | 'e' | 'f' => vec!["varied", "q", "Q"],
        'g' | 'i' | 'k' | 'm' => vec!["varied", "jz_over_j"],
        _ => vec!["varied", "n"],
    };
    let rows = ground_state_sweep(&spec)?;
    let steps = |f: fn(&SweepRow) -> f64| rows.windows(2).map(move |w| f(&w[1]) - f(&w[0]));
    let max_abs = |f: fn(&SweepRow) -> f64| steps(f).map(f64::abs).fold(0.0, f64::max);
    let monotone = steps(|r| r.atom_q).all(|d| d >= -1e-12) || steps(|r| r.atom_q).all(|d| d <= 1e-12);
    let jump = refine_jump(&spec, &rows);
    let verdict = SweepVerdict {
        figure: figure.to_string(),
        fixed_name,
        fixed_value,
        varied: if fixed_name == "alpha" { "gamma" } else { "alpha" },
        lo: spec.lo,
        hi: spec.hi,
        points: rows.len(),
        plotted,
        max_adjacent_jump_q: max_abs(|r| r.field_q),
        max_adjacent_jump_atom_q: max_abs(|r| r.atom_q),
        monotone_atom_q: monotone,
        jump_detected: jump.is_some(),
        jump_location: jump.as_ref().map(|j| j.location),
        jump_q: jump.as_ref().map(|j| j.dq),
        jump_atom_q: jump.as_ref().map(|j| j.d_atom_q),
    };
    Ok(Reproduction {
        figure,
        tables: vec![(figure.to_string(), sweep_table(&rows))],
        verdict: serde_json::to_value(verdict).expect("verdict encodes"),
    })
}

#[derive(Debug, Serialize)]
struct DiagramVerdict {
    figure: &'static str,
    gamma_range: [f64; 2],
    alpha_range: [f64; 2],
    cells: usize,
    double_well_cells: usize,
    alpha_c_at_gamma_1_5: Option<f64>,
    wells_even_in_alpha: bool,
    critical_line_increasing: bool,
    first_gamma_with_double_well: Option<f64>,
}

fn fig2() -> Result<Reproduction, CliError> {
    let base = resonant(0.0, 0.0)?;
    let (gl, gh, al, ah, n) = (0.0, 2.0, -2.0, 2.0, 101);
    let pd = classify_grid(&base, GridAxis::new(gl, gh, n)?, GridAxis::new(al, ah, n)?);
    let even = pd
        .cells
        .chunks(n)
        .all(|row| (0..n).all(|k| row[k].well_count == row[n - 1 - k].well_count));
    let line: Vec<(f64, f64)> = pd.boundary_polylines()[0].clone();
    let mut polyline = Table::new(&["gamma", "alpha_c", "minus_alpha_c"]);
    for &(g, a) in &line {
        polyline.push(vec![g.into(), a.into(), (-a).into()]);
    }
    let verdict = DiagramVerdict {
        figure: "fig2",
        gamma_range: [gl, gh],
        alpha_range: [al, ah],
        cells: pd.cells.len(),
        double_well_cells: pd.cells.iter().filter(|c| c.well_count == 2).count(),
        alpha_c_at_gamma_1_5: critical_alpha(&base, GAMMA),
        wells_even_in_alpha: even,
        critical_line_increasing: line.windows(2).all(|w| w[1].1 > w[0].1),
        first_gamma_with_double_well: line.first().map(|&(g, _)| g),
    };
    Ok(Reproduction {
        figure: Figure::Fig2,
        tables: vec![("fig2".into(), grid_table(&pd)), ("fig2_alpha_c".into(), polyline)],
        verdict: serde_json::to_value(verdict).expect("verdict encodes"),
    })
}

#[derive(Debug, Serialize)]
struct TrajectoryVerdict {
    figure: String,
    gamma: f64,
    alpha: f64,
    initial_state: [f64; 4],
    caption_energy: f64,
    energy: f64,
    caption_energy_error: f64,
    t_end: f64,
    tolerance: f64,
    drift: f64,
    terminated_early: Option<String>,
    lambda_max: f64,
    label: String,
    converged: bool,
    wells: usize,
    start_side: String,
    lobes: usize,
    confined: Option<bool>,
}

/// Resolution of the accessible-region bitmap used for lobe membership.
pub const LOBE_RESOLUTION: usize = 801;

/// Whether every sample stays in the lobe holding the first one; `None`
/// unless the shell splits into exactly two lobes.
fn confinement(params: &ModelParams, tr: &Trajectory) -> Result<(usize, Option<bool>), CliError> {
    let n = LOBE_RESOLUTION;
    let region = accessible_region(params, tr.initial_energy(), n)?;
    let (count, labels) = region.components();
    if count != 2 {
        return Ok((count, None));
    }
    let node = |x: f64| (((x + 2.0) / 4.0 * (n - 1) as f64).round() as usize).min(n - 1);
    let lobe = |s: &PhaseState| labels[node(s.atom_p) * n + node(s.atom_q)];
    let start = tr.samples.iter().map(|s| lobe(&s.state)).find(|&l| l != 0);
    // unlabelled nodes are pixels the bitmap misses along the lobe edge
    let confined = start.map(|st| {
        tr.samples.iter().all(|s| {
            let l = lobe(&s.state);
            l == 0 || l == st
        })
    });
    Ok((count, confined))
}

fn fig3(panel: char) -> Result<Reproduction, CliError> {
    let figure = Figure::Fig3(panel);
    let &(_, alpha, caption_energy, s0) = FIG3_CASES.iter().find(|c| c.0 == panel).expect("panel in a..i");
    let p = resonant(GAMMA, alpha)?;
    let start = PhaseState::from_array(s0);
    let energy = hamiltonian(&p, start)?;
    let cfg = IntegrationConfig::default().with_tol(FIG3_TOLERANCE);
    let tr = evolve(&p, start, &cfg)?;
    let ly = lyapunov_max(&p, start, &LyapunovConfig::default())?;
    let (lobes, confined) = confinement(&p, &tr)?;
    let mut table = Table::new(&["t", "q", "p", "Q", "P", "E"]);
    for (s, e) in tr.samples.iter().zip(&tr.energies) {
        let [q, pp, aq, ap] = s.state.to_array();
        table.push(vec![s.t.into(), q.into(), pp.into(), aq.into(), ap.into(), (*e).into()]);
    }
    let verdict = TrajectoryVerdict {
        figure: figure.to_string(),
        gamma: GAMMA,
        alpha,
        initial_state: s0,
        caption_energy,
        energy,
        caption_energy_error: (energy - caption_energy).abs(),
        t_end: cfg.t_end,
        tolerance: FIG3_TOLERANCE,
        drift: tr.drift,
        terminated_early: tr.terminated_early.as_ref().map(|t| t.reason.clone()),
        lambda_max: ly.lambda_max,
        label: ly.label.to_string(),
        converged: ly.converged,
        wells: well_count(&p),
        start_side: WellSide::of(start.atom_q).to_string(),
        lobes,
        confined,
    };
    Ok(Reproduction {
        figure,
        tables: vec![(figure.to_string(), table)],
        verdict: serde_json::to_value(verdict).expect("verdict encodes"),
    })
}
