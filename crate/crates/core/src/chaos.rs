//! Regular versus chaotic motion: largest Lyapunov exponent by the
//! two-trajectory Benettin method, and Poincaré sections.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equilibria::WellSide;
use crate::error::{DickeError, Result};
use crate::integrator::Termination;
use crate::model::{flow_array, ModelParams, PhaseState, BOUNDARY_TOLERANCE, SINGULAR_EPSILON};
use crate::ode::{Dop853, StepControl};
use crate::shell::{in_well_ic, WellInitialCondition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub t_total: f64,
    pub renorm_dt: f64,
    pub delta0: f64,
    /// Exponents above this are labelled chaotic.
    pub threshold: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            t_total: 5000.0,
            renorm_dt: 1.0,
            delta0: 1e-8,
            threshold: 0.005,
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: 0.1,
        }
    }
}

impl LyapunovConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_total", self.t_total),
            ("renorm_dt", self.renorm_dt),
            ("delta0", self.delta0),
            ("threshold", self.threshold),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DickeError::InvalidConfig(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.renorm_dt >= self.t_total {
            return Err(DickeError::InvalidConfig("renorm_dt must be smaller than t_total".into()));
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_step: self.max_step }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChaosLabel {
    Regular,
    Chaotic,
    Inconclusive,
}

impl fmt::Display for ChaosLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChaosLabel::Regular => "regular",
            ChaosLabel::Chaotic => "chaotic",
            ChaosLabel::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    pub lambda_max: f64,
    /// `(t, running estimate)` after each renormalization.
    pub convergence_series: Vec<(f64, f64)>,
    pub label: ChaosLabel,
    /// Integration time actually covered.
    pub t_total: f64,
    pub converged: bool,
    pub termination: Option<Termination>,
}

/// Passes when the spread of the last quarter of the running estimate is
/// under a quarter of its level. The level is floored at the threshold so
/// that estimates decaying towards zero can still converge.
pub fn convergence_gate(series: &[(f64, f64)], threshold: f64) -> bool {
    let n = series.len();
    if n < 8 {
        return false;
    }
    let tail = &series[n - n / 4..];
    let m = tail.len() as f64;
    let mean = tail.iter().map(|s| s.1).sum::<f64>() / m;
    let var = tail.iter().map(|s| (s.1 - mean).powi(2)).sum::<f64>() / m;
    var.sqrt() < 0.25 * mean.abs().max(threshold)
}

fn split(y: &[f64; 8]) -> ([f64; 4], [f64; 4]) {
    let mut a = [0.0; 4];
    let mut b = [0.0; 4];
    a.copy_from_slice(&y[..4]);
    b.copy_from_slice(&y[4..]);
    (a, b)
}

fn margin(y: &[f64]) -> f64 {
    4.0 - y[2] * y[2] - y[3] * y[3]
}

pub fn lyapunov_max(params: &ModelParams, s0: PhaseState, cfg: &LyapunovConfig) -> Result<LyapunovResult> {
    cfg.validate()?;
    let s0 = s0.validated(BOUNDARY_TOLERANCE)?;
    let p = *params;
    let rhs = move |y: &[f64; 8]| -> Result<[f64; 8]> {
        let (a, b) = split(y);
        let fa = flow_array(&p, &a, SINGULAR_EPSILON)?;
        let fb = flow_array(&p, &b, SINGULAR_EPSILON)?;
        let mut out = [0.0; 8];
        out[..4].copy_from_slice(&fa);
        out[4..].copy_from_slice(&fb);
        Ok(out)
    };

    let base = s0.to_array();
    let mut y0 = [0.0; 8];
    for i in 0..4 {
        y0[i] = base[i];
        // unit direction (1,1,1,1)/2
        y0[4 + i] = base[i] + 0.5 * cfg.delta0;
    }

    let mut series = Vec::with_capacity((cfg.t_total / cfg.renorm_dt) as usize + 1);
    let mut log_sum = 0.0;
    let mut termination = None;
    let mut t_reached = 0.0;

    match Dop853::new(rhs, 0.0, y0, cfg.step_control()) {
        Err(e) => termination = Some(Termination { t: 0.0, reason: e.to_string() }),
        Ok(mut solver) => {
            let mut k = 1usize;
            'outer: loop {
                let t_next = (k as f64 * cfg.renorm_dt).min(cfg.t_total);
                while solver.t() < t_next {
                    if let Err(e) = solver.step(t_next) {
                        termination = Some(Termination { t: solver.t(), reason: e.to_string() });
                        break 'outer;
                    }
                    let y = solver.y();
                    let m = margin(&y[..4]).min(margin(&y[4..]));
                    if m < SINGULAR_EPSILON {
                        termination = Some(Termination {
                            t: solver.t(),
                            reason: DickeError::Singular { margin: m }.to_string(),
                        });
                        break 'outer;
                    }
                }
                let (a, mut b) = split(solver.y());
                let d = (0..4).map(|i| (b[i] - a[i]).powi(2)).sum::<f64>().sqrt();
                log_sum += (d / cfg.delta0).ln();
                t_reached = solver.t();
                series.push((t_reached, log_sum / t_reached));
                if t_next >= cfg.t_total {
                    break;
                }
                for i in 0..4 {
                    b[i] = a[i] + (b[i] - a[i]) * cfg.delta0 / d;
                }
                let mut y = [0.0; 8];
                y[..4].copy_from_slice(&a);
                y[4..].copy_from_slice(&b);
                if let Err(e) = solver.reset_state(y) {
                    termination = Some(Termination { t: solver.t(), reason: e.to_string() });
                    break;
                }
                k += 1;
            }
        }
    }

    let lambda_max = series.last().map_or(0.0, |s| s.1);
    let valid = termination.as_ref().is_none_or(|t| t.t >= 0.5 * cfg.t_total) && !series.is_empty();
    let converged = valid && convergence_gate(&series, cfg.threshold);
    let label = if !converged {
        ChaosLabel::Inconclusive
    } else if lambda_max > cfg.threshold {
        ChaosLabel::Chaotic
    } else {
        ChaosLabel::Regular
    };
    Ok(LyapunovResult { lambda_max, convergence_series: series, label, t_total: t_reached, converged, termination })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    FieldQ,
    FieldP,
    AtomQ,
    AtomP,
}

impl Coordinate {
    fn index(self) -> usize {
        match self {
            Coordinate::FieldQ => 0,
            Coordinate::FieldP => 1,
            Coordinate::AtomQ => 2,
            Coordinate::AtomP => 3,
        }
    }
}

impl std::str::FromStr for Coordinate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "q" => Ok(Coordinate::FieldQ),
            "p" => Ok(Coordinate::FieldP),
            "Q" => Ok(Coordinate::AtomQ),
            "P" => Ok(Coordinate::AtomP),
            other => Err(format!("unknown coordinate '{other}' (expected q, p, Q or P)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upward,
    Downward,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPlane {
    pub coordinate: Coordinate,
    pub value: f64,
    pub direction: Direction,
}

impl Default for SectionPlane {
    fn default() -> Self {
        Self { coordinate: Coordinate::FieldP, value: 0.0, direction: Direction::Upward }
    }
}

impl SectionPlane {
    /// Coordinates recorded at a crossing: the other degree of freedom.
    pub fn recorded(&self) -> (Coordinate, Coordinate) {
        match self.coordinate {
            Coordinate::FieldQ | Coordinate::FieldP => (Coordinate::AtomQ, Coordinate::AtomP),
            Coordinate::AtomQ | Coordinate::AtomP => (Coordinate::FieldQ, Coordinate::FieldP),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareSection {
    pub plane: SectionPlane,
    pub points: Vec<[f64; 2]>,
    pub times: Vec<f64>,
    pub termination: Option<Termination>,
}

// Illinois-modified regula falsi on the step interpolant.
fn refine<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, mut ga: f64, mut gb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..100 {
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = g(c);
        if gc == 0.0 || (b - a).abs() < 1e-14 * (1.0 + b.abs()) {
            return c;
        }
        if (gc < 0.0) == (gb < 0.0) {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (a + b)
}

pub fn poincare(params: &ModelParams, s0: PhaseState, plane: SectionPlane, t_total: f64) -> Result<PoincareSection> {
    if !(t_total > 0.0 && t_total.is_finite()) {
        return Err(DickeError::InvalidConfig(format!("t_total must be finite and > 0, got {t_total}")));
    }
    let s0 = s0.validated(BOUNDARY_TOLERANCE)?;
    let p = *params;
    let control = StepControl { rel_tol: 1e-10, abs_tol: 1e-10, max_step: 0.1 };
    let ci = plane.coordinate.index();
    let (r0, r1) = plane.recorded();
    let (r0, r1) = (r0.index(), r1.index());
    let mut section = PoincareSection { plane, points: Vec::new(), times: Vec::new(), termination: None };

    let mut solver = match Dop853::new(move |y: &[f64; 4]| flow_array(&p, y, SINGULAR_EPSILON), 0.0, s0.to_array(), control) {
        Ok(s) => s,
        Err(e) => {
            section.termination = Some(Termination { t: 0.0, reason: e.to_string() });
            return Ok(section);
        }
    };
    while solver.t() < t_total {
        let g_old = solver.y()[ci] - plane.value;
        if let Err(e) = solver.step(t_total) {
            section.termination = Some(Termination { t: solver.t(), reason: e.to_string() });
            break;
        }
        let g_new = solver.y()[ci] - plane.value;
        let up = g_old < 0.0 && g_new >= 0.0;
        let down = g_old > 0.0 && g_new <= 0.0;
        let hit = match plane.direction {
            Direction::Upward => up,
            Direction::Downward => down,
            Direction::Both => up || down,
        };
        if hit {
            let dense = solver.dense()?;
            let t = if g_new == 0.0 {
                dense.t_new
            } else {
                refine(|t| dense.eval(t)[ci] - plane.value, dense.t_old, dense.t_new, g_old, g_new)
            };
            let y = dense.eval(t);
            section.points.push([y[r0], y[r1]]);
            section.times.push(t);
        }
        let m = margin(solver.y());
        if m < SINGULAR_EPSILON {
            section.termination =
                Some(Termination { t: solver.t(), reason: DickeError::Singular { margin: m }.to_string() });
            break;
        }
    }
    Ok(section)
}

/// Box-counting dimension of a planar point set: least-squares slope of
/// `ln N(k)` against `ln k`, with `k` boxes per side of the bounding square.
/// Curves give about 1, area-filling sets approach 2.
pub fn box_counting_dimension(points: &[[f64; 2]], boxes_per_side: &[usize]) -> Option<f64> {
    if points.len() < 2 || boxes_per_side.len() < 2 {
        return None;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let side = (x1 - x0).max(y1 - y0);
    if !(side > 0.0) {
        return Some(0.0);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &k in boxes_per_side {
        let mut occupied = std::collections::HashSet::new();
        for p in points {
            let i = (((p[0] - x0) / side * k as f64) as usize).min(k - 1);
            let j = (((p[1] - y0) / side * k as f64) as usize).min(k - 1);
            occupied.insert((i, j));
        }
        xs.push((k as f64).ln());
        ys.push((occupied.len() as f64).ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellChaos {
    pub initial: WellInitialCondition,
    pub lyapunov: LyapunovResult,
}

impl WellChaos {
    pub fn label(&self) -> ChaosLabel {
        self.lyapunov.label
    }
}

/// Builds an in-well initial condition at energy `E` and labels its dynamics.
pub fn classify_well_chaos(params: &ModelParams, energy: f64, well: WellSide, cfg: &LyapunovConfig) -> Result<WellChaos> {
    let initial = in_well_ic(params, energy, well)?;
    let lyapunov = lyapunov_max(params, initial.state, cfg)?;
    Ok(WellChaos { initial, lyapunov })
}
