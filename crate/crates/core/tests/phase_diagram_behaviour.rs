use dicke_core::equilibria::well_structure;
use dicke_core::model::ModelParams;
use dicke_core::phase_diagram::{
    accessible_region, classify_grid, critical_alpha, ground_state_sweep, linspace, GridAxis, SweepAxis, SweepSpec,
};

fn res(gamma: f64, alpha: f64) -> ModelParams {
    ModelParams::resonant(gamma, alpha).unwrap()
}

fn base() -> ModelParams {
    res(0.0, 0.0)
}

#[test]
fn critical_alpha_anchor() {
    let ac = critical_alpha(&base(), 1.5).unwrap();
    assert!((ac - 1.43019).abs() < 1e-3, "{ac}");
    assert_eq!(critical_alpha(&base(), -1.5), Some(ac));
}

#[test]
fn critical_line_starts_at_the_critical_coupling() {
    let ac = critical_alpha(&base(), 0.5 + 1e-4).unwrap();
    assert!(ac > 0.0 && ac < 1e-2, "{ac}");
    let closer = critical_alpha(&base(), 0.5 + 1e-5).unwrap();
    assert!(closer < ac);
}

#[test]
fn critical_line_increases_with_coupling() {
    let line: Vec<f64> = linspace(0.52, 2.0, 38).iter().map(|&g| critical_alpha(&base(), g).unwrap()).collect();
    assert!(line.windows(2).all(|w| w[1] > w[0]), "{line:?}");
}

#[test]
fn grid_cells_match_the_examples() {
    let pd = classify_grid(&base(), GridAxis::new(1.5, 1.5 + 1e-9, 2).unwrap(), GridAxis::new(-1.5, 1.5, 31).unwrap());
    let at = |alpha: f64| pd.cells.iter().find(|c| c.gamma == 1.5 && (c.alpha - alpha).abs() < 1e-12).unwrap();
    assert_eq!(at(0.7).well_count, 2);
    assert_eq!(at(1.5).well_count, 1);
    assert_eq!(at(0.0).well_count, 2);
    assert!(at(0.0).degenerate);
    assert!(at(0.7).esqpt_energy.is_some());
    assert!(!at(0.7).degenerate);
    let ac = at(0.0).alpha_c_here.unwrap();
    assert!((ac - 1.43019).abs() < 1e-3);
}

#[test]
fn grid_is_symmetric_in_alpha() {
    let pd = classify_grid(&base(), GridAxis::new(0.0, 2.0, 21).unwrap(), GridAxis::new(-2.0, 2.0, 41).unwrap());
    assert_eq!(pd.cells.len(), 21 * 41);
    for row in pd.cells.chunks(41) {
        for k in 0..41 {
            let (a, b) = (row[k], row[40 - k]);
            assert!((a.alpha + b.alpha).abs() < 1e-12);
            assert_eq!(a.well_count, b.well_count, "{a:?} {b:?}");
            assert!((a.ground_energy - b.ground_energy).abs() < 1e-10);
            if a.well_count == 2 {
                assert!(a.ground_energy < a.second_well_energy.unwrap() || a.degenerate);
                assert!(a.second_well_energy.unwrap() < a.esqpt_energy.unwrap());
            }
        }
    }
    let [upper, lower] = pd.boundary_polylines();
    assert_eq!(upper.len(), lower.len());
    assert!(upper.iter().all(|&(g, _)| g > 0.5));
}

#[test]
fn weak_deformation_sweep_is_smooth_and_positive() {
    let spec = SweepSpec { base: res(0.0, 0.25), varied: SweepAxis::Gamma, lo: 0.0, hi: 1.1, count: 201 };
    let rows = ground_state_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 201);
    assert!(rows.windows(2).all(|w| w[1].varied > w[0].varied));
    assert!(rows.iter().all(|r| r.atom_q >= 0.0));
    assert!(rows.windows(2).all(|w| w[1].atom_q >= w[0].atom_q - 1e-12));
    let max_jump = rows.windows(2).map(|w| (w[1].atom_q - w[0].atom_q).abs()).fold(0.0, f64::max);
    assert!(max_jump < 0.05, "{max_jump}");
}

#[test]
fn normal_phase_alpha_sweep_is_monotone() {
    let spec = SweepSpec { base: res(0.1, 0.0), varied: SweepAxis::Alpha, lo: -0.5, hi: 0.5, count: 201 };
    let rows = ground_state_sweep(&spec).unwrap();
    assert!(rows.windows(2).all(|w| w[1].atom_q > w[0].atom_q));
    for r in &rows {
        assert_eq!(r.atom_q.partial_cmp(&0.0), r.varied.partial_cmp(&0.0), "{r:?}");
        assert_eq!(well_structure(&res(0.1, r.varied)).well_count(), 1);
    }
}

#[test]
fn superradiant_alpha_sweep_jumps_at_zero() {
    let spec = SweepSpec { base: res(1.0, 0.0), varied: SweepAxis::Alpha, lo: -0.5, hi: 0.5, count: 201 };
    let rows = ground_state_sweep(&spec).unwrap();
    let (k, jump) = rows
        .windows(2)
        .enumerate()
        .map(|(k, w)| (k, w[1].atom_q - w[0].atom_q))
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    assert!(jump > 1.0, "{jump}");
    assert_eq!(rows[k + 1].varied, 0.0);
    let field_jump = rows[k + 1].field_q - rows[k].field_q;
    assert!(field_jump < -1.0);
}

#[test]
fn ground_energy_curvature_jumps_at_the_critical_coupling() {
    // E0 = -(x^2 + 1/x^2)/2 above the transition (x = gamma/gamma_c), flat below:
    // the second derivative jumps from 0 to -4/gamma_c^2
    let h = 1e-3;
    let spec = SweepSpec { base: res(0.0, 0.0), varied: SweepAxis::Gamma, lo: 0.5 - 2.0 * h, hi: 0.5 + 2.0 * h, count: 5 };
    let e: Vec<f64> = ground_state_sweep(&spec).unwrap().iter().map(|r| r.energy).collect();
    let slope_left = (e[2] - e[0]) / (2.0 * h);
    let slope_right = (e[4] - e[2]) / (2.0 * h);
    assert!(slope_left.abs() < 1e-9 && slope_right.abs() < 0.05, "{slope_left} {slope_right}");
    let curv_left = (e[0] - 2.0 * e[1] + e[2]) / (h * h);
    let curv_right = (e[2] - 2.0 * e[3] + e[4]) / (h * h);
    assert!(curv_left.abs() < 1e-3, "{curv_left}");
    assert!((curv_right + 16.0).abs() < 0.5, "{curv_right}");
}

#[test]
fn connectivity_changes_at_the_critical_energies() {
    let p = res(1.5, 0.5);
    let ws = well_structure(&p);
    let second = ws.second_well_energy.unwrap();
    let saddle = ws.esqpt_energy.unwrap();
    let n = 401;
    let count = |e: f64| accessible_region(&p, e, n).unwrap().component_count();
    let d = 0.05;
    assert_eq!(count(ws.ground.energy + d), 1);
    assert_eq!(count(second - d), 1);
    assert_eq!(count(second + d), 2);
    assert_eq!(count(saddle - d), 2);
    assert_eq!(count(saddle + d), 1);
    // the Fig. 3(a)/(b) shells both sit between the well bottoms and the barrier
    assert_eq!(count(-2.0007), 2);
    assert_eq!(count(-1.9993), 2);
}
