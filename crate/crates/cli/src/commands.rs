use std::path::PathBuf;

use dicke_core::chaos::{lyapunov_max, poincare, ChaosLabel, Coordinate, LyapunovConfig, SectionPlane};
use dicke_core::equilibria::ground_state;
use dicke_core::integrator::{evolve, IntegrationConfig};
use dicke_core::model::{hamiltonian, observables, PhaseState};
use dicke_core::phase_diagram::{classify_grid, critical_alpha, ground_state_sweep, GridAxis, SweepAxis, SweepSpec};
use dicke_core::shell::{in_well_ic, solve_q_on_shell, Branch, ShellRequest};
use dicke_core::ModelParams;
use serde_json::{json, Map, Value};

use crate::args::{
    BasicArgs, EnergyArgs, EvolveArgs, GridArgs, LyapunovArgs, ModelArgs, OutputArgs, PoincareArgs, ShellArgs,
    StateArg, SweepArgs, Varied,
};
use crate::config::{Block, FileConfig};
use crate::error::CliError;
use crate::table::{Cell, Format, Naming, Table};

#[derive(Debug, Clone)]
pub struct Destination {
    pub path: Option<PathBuf>,
    pub format: Format,
    pub naming: Naming,
}

impl Destination {
    pub fn resolve(o: &OutputArgs, file: &FileConfig, default_format: Format) -> Self {
        Self {
            path: o.out.clone().or_else(|| file.output.path.clone()),
            format: o.format.or(file.output.format).unwrap_or(default_format),
            naming: o.naming.or(file.output.naming).unwrap_or_default(),
        }
    }
}

/// What a command produced: a table (one row when `scalar`), extra summary
/// fields, and an optional failure to report after the output is written.
#[derive(Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub table: Table,
    pub scalar: bool,
    pub summary: Map<String, Value>,
    pub failure: Option<CliError>,
    pub destination: Destination,
}

impl Outcome {
    fn scalar(command: &'static str, table: Table, destination: Destination) -> Self {
        Self { command, table, scalar: true, summary: Map::new(), failure: None, destination }
    }

    fn tabular(command: &'static str, table: Table, summary: Value, destination: Destination) -> Self {
        let summary = match summary {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self { command, table, scalar: false, summary, failure: None, destination }
    }
}

pub fn model(m: &ModelArgs, file: &FileConfig) -> Result<ModelParams, CliError> {
    let f = &file.model;
    Ok(ModelParams::new(
        m.omega.or(f.omega).unwrap_or(1.0),
        m.omega0.or(f.omega0).unwrap_or(1.0),
        m.gamma.or(f.gamma).unwrap_or(0.0),
        m.alpha.or(f.alpha).unwrap_or(0.0),
    )?)
}

fn state(flag: Option<StateArg>, file: &FileConfig) -> Result<PhaseState, CliError> {
    flag.or(file.initial.state)
        .map(|s| PhaseState::from_array(s.0))
        .ok_or_else(|| CliError::Usage("--state q,p,Q,P is required".into()))
}

fn state_cells(s: &PhaseState) -> Vec<Cell> {
    vec![s.field_q.into(), s.field_p.into(), s.atom_q.into(), s.atom_p.into()]
}

pub fn energy(a: &EnergyArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("energy", &[])?;
    let p = model(&a.model, file)?;
    let s = state(a.state, file)?;
    let obs = observables(&p, s)?;
    let mut t = Table::new(&["q", "p", "Q", "P", "energy", "atomic_inversion", "mean_photon"]);
    let mut row = state_cells(&s);
    row.extend([obs.energy.into(), obs.atomic_inversion.into(), obs.mean_photon.into()]);
    t.push(row);
    Ok(Outcome::scalar("energy", t, Destination::resolve(&a.output, file, Format::Json)))
}

pub fn evolve_cmd(a: &EvolveArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("evolve", &[Block::Integration])?;
    let p = model(&a.model, file)?;
    let s0 = state(a.state, file)?;
    let ib = file.integration.clone().unwrap_or_default();
    let d = IntegrationConfig::default();
    let tol = a.tol.or(ib.tol);
    let cfg = IntegrationConfig {
        t_end: a.t_end.or(ib.t_end).unwrap_or(d.t_end),
        sample_dt: a.sample_dt.or(ib.sample_dt).unwrap_or(d.sample_dt),
        rel_tol: tol.unwrap_or(d.rel_tol),
        abs_tol: tol.unwrap_or(d.abs_tol),
        max_step: ib.max_step.unwrap_or(d.max_step),
        noise_sigma: a.noise_sigma.or(ib.noise_sigma).unwrap_or(0.0),
        rng_seed: a.seed.or(file.seed).unwrap_or(0),
    };
    let tr = evolve(&p, s0, &cfg)?;
    let mut t = Table::new(&["t", "q", "p", "Q", "P", "E"]);
    for (s, e) in tr.samples.iter().zip(&tr.energies) {
        let mut row = vec![s.t.into()];
        row.extend(state_cells(&s.state));
        row.push((*e).into());
        t.push(row);
    }
    let summary = json!({
        "initial_energy": tr.initial_energy(),
        "drift": tr.drift,
        "final_time": tr.final_time,
        "terminated_early": tr.terminated_early.as_ref().map(|x| x.reason.clone()),
    });
    let mut out = Outcome::tabular("evolve", t, summary, Destination::resolve(&a.output, file, Format::Csv));
    if let Some(term) = &tr.terminated_early {
        out.failure = Some(CliError::Numerical(format!("integration stopped at t = {}: {}", term.t, term.reason)));
    }
    Ok(out)
}

pub fn ground(a: &BasicArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("ground-state", &[])?;
    let p = model(&a.model, file)?;
    let g = ground_state(&p);
    let e = g.equilibrium;
    let obs = observables(&p, e.state)?;
    let mut t = Table::new(&["q", "p", "Q", "P", "energy", "atomic_inversion", "mean_photon", "kind", "degenerate"]);
    let mut row = state_cells(&e.state);
    row.extend([
        e.energy.into(),
        obs.atomic_inversion.into(),
        obs.mean_photon.into(),
        e.kind.to_string().into(),
        g.degenerate.into(),
    ]);
    t.push(row);
    Ok(Outcome::scalar("ground-state", t, Destination::resolve(&a.output, file, Format::Json)))
}

pub fn sweep(a: &SweepArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("sweep", &[Block::Sweep])?;
    let base = model(&a.model, file)?;
    let sb = file.sweep.clone().unwrap_or_default();
    let vary = a.vary.or(sb.vary).unwrap_or(Varied::Gamma);
    let (lo, hi) = match vary {
        Varied::Gamma => (0.0, 2.0),
        Varied::Alpha => (-2.0, 2.0),
    };
    let spec = SweepSpec {
        base,
        varied: match vary {
            Varied::Gamma => SweepAxis::Gamma,
            Varied::Alpha => SweepAxis::Alpha,
        },
        lo: a.lo.or(sb.lo).unwrap_or(lo),
        hi: a.hi.or(sb.hi).unwrap_or(hi),
        count: a.count.or(sb.count).unwrap_or(201),
    };
    let rows = ground_state_sweep(&spec)?;
    let t = sweep_table(&rows);
    let summary = json!({ "varied": format!("{vary:?}").to_lowercase(), "rows": rows.len() });
    Ok(Outcome::tabular("sweep", t, summary, Destination::resolve(&a.output, file, Format::Csv)))
}

pub(crate) fn sweep_table(rows: &[dicke_core::phase_diagram::SweepRow]) -> Table {
    let mut t = Table::new(&["varied", "q", "Q", "jz_over_j", "n", "energy"]);
    for r in rows {
        t.push(vec![
            r.varied.into(),
            r.field_q.into(),
            r.atom_q.into(),
            r.atomic_inversion.into(),
            r.mean_photon.into(),
            r.energy.into(),
        ]);
    }
    t
}

pub fn phase_diagram(a: &GridArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("phase-diagram", &[Block::Grid])?;
    let m = ModelArgs { omega: a.omega, omega0: a.omega0, gamma: None, alpha: None };
    let base = model(&m, file)?;
    let g = file.grid.clone().unwrap_or_default();
    let gammas = GridAxis::new(
        a.gamma_min.or(g.gamma_min).unwrap_or(0.0),
        a.gamma_max.or(g.gamma_max).unwrap_or(2.0),
        a.gamma_count.or(g.gamma_count).unwrap_or(101),
    )?;
    let alphas = GridAxis::new(
        a.alpha_min.or(g.alpha_min).unwrap_or(-2.0),
        a.alpha_max.or(g.alpha_max).unwrap_or(2.0),
        a.alpha_count.or(g.alpha_count).unwrap_or(101),
    )?;
    let pd = classify_grid(&base, gammas, alphas);
    let t = grid_table(&pd);
    let double = pd.cells.iter().filter(|c| c.well_count == 2).count();
    let summary = json!({ "cells": pd.cells.len(), "double_well_cells": double });
    Ok(Outcome::tabular("phase-diagram", t, summary, Destination::resolve(&a.output, file, Format::Csv)))
}

pub(crate) fn grid_table(pd: &dicke_core::phase_diagram::PhaseDiagram) -> Table {
    let mut t = Table::new(&["gamma", "alpha", "wells", "E0", "E_esqpt"]);
    for c in &pd.cells {
        t.push(vec![c.gamma.into(), c.alpha.into(), c.well_count.into(), c.ground_energy.into(), c.esqpt_energy.into()]);
    }
    t
}

pub fn critical(a: &BasicArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("critical-alpha", &[])?;
    let p = model(&a.model, file)?;
    let mut t = Table::new(&["gamma", "alpha_c"]);
    t.push(vec![p.gamma().into(), critical_alpha(&p, p.gamma()).into()]);
    Ok(Outcome::scalar("critical-alpha", t, Destination::resolve(&a.output, file, Format::Json)))
}

pub fn lyapunov(a: &LyapunovArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("lyapunov", &[Block::Chaos, Block::Shell])?;
    let p = model(&a.model, file)?;
    let cb = file.chaos.clone().unwrap_or_default();
    let sb = file.shell.clone().unwrap_or_default();
    let d = LyapunovConfig::default();
    let tol = a.tol.or(cb.tol);
    let cfg = LyapunovConfig {
        t_total: a.t_total.or(cb.t_total).unwrap_or(d.t_total),
        renorm_dt: a.renorm_dt.or(cb.renorm_dt).unwrap_or(d.renorm_dt),
        delta0: a.delta0.or(cb.delta0).unwrap_or(d.delta0),
        threshold: a.threshold.or(cb.threshold).unwrap_or(d.threshold),
        rel_tol: tol.unwrap_or(d.rel_tol),
        abs_tol: tol.unwrap_or(d.abs_tol),
        max_step: d.max_step,
    };
    let flag_state = a.state.or(file.initial.state);
    let energy = a.energy.or(sb.energy);
    let well = a.well.or(sb.well);
    let s0 = match (flag_state, energy, well) {
        (Some(s), None, None) => PhaseState::from_array(s.0),
        (None, Some(e), Some(w)) => in_well_ic(&p, e, w.into())?.state,
        _ => return Err(CliError::Usage("give either --state, or --energy together with --well".into())),
    };
    let r = lyapunov_max(&p, s0, &cfg)?;
    let mut t = Table::new(&["lambda_max", "label", "t_total", "converged"]);
    t.push(vec![r.lambda_max.into(), r.label.to_string().into(), r.t_total.into(), r.converged.into()]);
    let mut out = Outcome::scalar("lyapunov", t, Destination::resolve(&a.output, file, Format::Json));
    if r.label == ChaosLabel::Inconclusive {
        let why = r.termination.as_ref().map_or("running estimate did not settle".to_string(), |x| x.reason.clone());
        out.failure = Some(CliError::Numerical(format!("Lyapunov estimate inconclusive: {why}")));
    }
    Ok(out)
}

fn coordinate_name(c: Coordinate) -> &'static str {
    match c {
        Coordinate::FieldQ => "q",
        Coordinate::FieldP => "p",
        Coordinate::AtomQ => "Q",
        Coordinate::AtomP => "P",
    }
}

pub fn poincare_cmd(a: &PoincareArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("poincare", &[Block::Chaos])?;
    let p = model(&a.model, file)?;
    let s0 = state(a.state, file)?;
    let cb = file.chaos.clone().unwrap_or_default();
    let mut plane = SectionPlane::default();
    if let Some(pl) = a.plane.or(cb.plane) {
        plane.coordinate = pl.coordinate;
        plane.value = pl.value;
    }
    if let Some(dir) = a.direction.or(cb.direction) {
        plane.direction = dir.into();
    }
    let t_total = a.t_total.or(cb.t_total).unwrap_or(LyapunovConfig::default().t_total);
    let sec = poincare(&p, s0, plane, t_total)?;
    let (c0, c1) = plane.recorded();
    let mut t = Table::new(&[coordinate_name(c0), coordinate_name(c1)]);
    for pt in &sec.points {
        t.push(vec![pt[0].into(), pt[1].into()]);
    }
    let summary = json!({ "crossings": sec.points.len() });
    let mut out = Outcome::tabular("poincare", t, summary, Destination::resolve(&a.output, file, Format::Csv));
    if let Some(term) = &sec.termination {
        out.failure = Some(CliError::Numerical(format!("integration stopped at t = {}: {}", term.t, term.reason)));
    }
    Ok(out)
}

pub fn shell_ic(a: &ShellArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    file.check_blocks("shell-ic", &[Block::Shell])?;
    let p = model(&a.model, file)?;
    let sb = file.shell.clone().unwrap_or_default();
    let energy = a.energy.or(sb.energy).ok_or_else(|| CliError::Usage("--energy is required".into()))?;
    let atom_q = a.atom_q.or(sb.atom_q);
    let branch = a.branch.or(sb.branch);
    let well = a.well.or(sb.well);
    let dest = Destination::resolve(&a.output, file, Format::Json);
    match (well, atom_q) {
        (Some(w), None) => {
            if branch.is_some() {
                return Err(CliError::Usage("--branch is chosen automatically with --well".into()));
            }
            let ic = in_well_ic(&p, energy, w.into())?;
            let mut t = Table::new(&["q", "p", "Q", "P", "energy_check", "branch", "ambiguous"]);
            let mut row = state_cells(&ic.state);
            row.extend([hamiltonian(&p, ic.state)?.into(), ic.branch.to_string().into(), ic.ambiguous.into()]);
            t.push(row);
            Ok(Outcome::scalar("shell-ic", t, dest))
        }
        (None, Some(aq)) => {
            let branch = branch.map_or(Branch::Plus, |b| b.0);
            let s = solve_q_on_shell(&ShellRequest { params: p, energy, atom_q: aq, branch })?;
            let mut t = Table::new(&["q", "p", "Q", "P", "energy_check"]);
            let mut row = state_cells(&s);
            row.push(hamiltonian(&p, s)?.into());
            t.push(row);
            Ok(Outcome::scalar("shell-ic", t, dest))
        }
        _ => Err(CliError::Usage("give exactly one of --atom-q and --well".into())),
    }
}
