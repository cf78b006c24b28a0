use dicke_core::equilibria::{well_structure, WellSide};
use dicke_core::model::{hamiltonian, ModelParams, PhaseState};
use dicke_core::shell::{in_well_ic, shell_roots, solve_q_on_shell, Branch, ShellRequest};
use dicke_core::DickeError;
use proptest::prelude::*;

fn res(gamma: f64, alpha: f64) -> ModelParams {
    ModelParams::resonant(gamma, alpha).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn roots_land_on_the_shell(gamma in -2.0f64..2.0, alpha in -2.0f64..2.0, aq in -1.99f64..1.99, lift in 0.0f64..20.0) {
        let p = res(gamma, alpha);
        let floor = dicke_core::model::effective_potential(&p, aq, 0.0).unwrap().value;
        let energy = floor + lift;
        let roots = shell_roots(&p, energy, aq).unwrap();
        prop_assert!(roots.plus >= roots.minus);
        for branch in [Branch::Plus, Branch::Minus] {
            let s = solve_q_on_shell(&ShellRequest { params: p, energy, atom_q: aq, branch }).unwrap();
            let h = hamiltonian(&p, s).unwrap();
            prop_assert!((h - energy).abs() < 1e-12 * (1.0 + energy.abs()), "{:?}: {} vs {}", branch, h, energy);
        }
    }

    #[test]
    fn energies_below_the_floor_have_no_root(gamma in -2.0f64..2.0, alpha in -2.0f64..2.0, aq in -1.99f64..1.99, gap in 1e-6f64..5.0) {
        let p = res(gamma, alpha);
        let floor = dicke_core::model::effective_potential(&p, aq, 0.0).unwrap().value;
        match shell_roots(&p, floor - gap, aq) {
            Err(DickeError::NoRealRoot { minimum, .. }) => prop_assert!((minimum - floor).abs() < 1e-9),
            other => prop_assert!(false, "{:?}", other),
        }
    }
}

#[test]
fn roots_outside_the_disk_are_rejected() {
    assert!(shell_roots(&res(1.5, 0.5), 0.0, 2.5).is_err());
}

#[test]
fn in_well_states_start_in_their_well() {
    for (alpha, lift) in [(0.5, 0.3), (0.7, 0.2), (1.1, 0.05), (0.0, 0.5), (-0.7, 0.2)] {
        let p = res(1.5, alpha);
        let ws = well_structure(&p);
        for side in [WellSide::Left, WellSide::Right] {
            let bottom = ws.minimum_on(side).unwrap().energy;
            let energy = bottom + lift;
            let ic = in_well_ic(&p, energy, side).unwrap();
            assert!((hamiltonian(&p, ic.state).unwrap() - energy).abs() < 1e-12);
            assert_eq!(WellSide::of(ic.state.atom_q), side);
            assert_eq!(ic.ambiguous, energy > ws.esqpt_energy.unwrap());
        }
    }
}

#[test]
fn caption_initial_conditions_are_recovered() {
    // Fig. 3 (a): E = -1.9993 at Q = -1.5 gives q = 1.32 on the lower root
    let p = res(1.5, 0.5);
    let s = solve_q_on_shell(&ShellRequest { params: p, energy: -1.9993, atom_q: -1.5, branch: Branch::Minus }).unwrap();
    assert!((s.field_q - 1.32).abs() < 2e-3, "{:?}", s);
    let s = solve_q_on_shell(&ShellRequest { params: p, energy: -2.0007, atom_q: 1.5, branch: Branch::Minus }).unwrap();
    assert!((s.field_q + 6.736).abs() < 2e-3, "{:?}", s);
    let caption = PhaseState::new(1.32, 0.0, -1.5, 0.0);
    assert!((hamiltonian(&p, caption).unwrap() + 1.9993).abs() < 2e-3);
}

#[test]
fn missing_well_is_reported() {
    let p = res(1.5, 1.5);
    let present = well_structure(&p).minima[0].well;
    let absent = if present == WellSide::Left { WellSide::Right } else { WellSide::Left };
    assert!(matches!(in_well_ic(&p, 0.0, absent), Err(DickeError::WellNotPresent(_))));
    assert!(matches!(in_well_ic(&p, -100.0, present), Err(DickeError::BelowWellBottom { .. })));
}

#[test]
#[ignore = "the roots at Q = -1.5 are 3.218 and 1.320; 1.32 is the lower root"]
fn caption_a_is_on_the_upper_root() {
    let p = res(1.5, 0.5);
    let s = solve_q_on_shell(&ShellRequest { params: p, energy: -1.9993, atom_q: -1.5, branch: Branch::Plus }).unwrap();
    assert!((s.field_q - 1.32).abs() < 5e-3, "{:?}", s);
}
