//! Classical deformed Dicke Hamiltonian, its flow field and derived observables.
//!
//! All energies are per particle and normalized by `j * omega0`. The atomic
//! coordinates live on the disk `Q^2 + P^2 <= 4`; the field coordinates are
//! unbounded.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

/// States with `Q^2 + P^2` in `(4, 4 + BOUNDARY_TOLERANCE]` are clamped onto the disk edge.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// `flow` refuses to evaluate once `4 - Q^2 - P^2` drops below this margin.
pub const SINGULAR_EPSILON: f64 = 1e-10;

/// Column names used when exporting states in electrical-circuit variables.
pub const ELECTRICAL_COLUMNS: [&str; 4] = ["I_L1", "V_C1", "I_L2", "V_C2"];

/// Column names for the canonical coordinates.
pub const CANONICAL_COLUMNS: [&str; 4] = ["q", "p", "Q", "P"];

/// The four constants defining one instance of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega: f64,
    omega0: f64,
    gamma: f64,
    alpha: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, gamma: f64, alpha: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(DickeError::InvalidParams(format!("omega must be > 0, got {omega}")));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(DickeError::InvalidParams(format!("omega0 must be > 0, got {omega0}")));
        }
        if !gamma.is_finite() || !alpha.is_finite() {
            return Err(DickeError::InvalidParams(format!(
                "gamma and alpha must be finite, got gamma={gamma}, alpha={alpha}"
            )));
        }
        Ok(Self { omega, omega0, gamma, alpha })
    }

    /// Resonant instance `omega = omega0 = 1`.
    pub fn resonant(gamma: f64, alpha: f64) -> Result<Self> {
        Self::new(1.0, 1.0, gamma, alpha)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Superradiant critical coupling `sqrt(omega * omega0) / 2`.
    pub fn gamma_c(&self) -> f64 {
        (self.omega * self.omega0).sqrt() / 2.0
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    /// Linear drive coefficient `sqrt(2 / omega0) * alpha` on the field coordinate.
    pub(crate) fn drive(&self) -> f64 {
        (2.0 / self.omega0).sqrt() * self.alpha
    }
}

/// A point `(q, p, Q, P)` of the four-dimensional classical phase space.
///
/// `field_*` are the bosonic-mode coordinates, `atom_*` the collective
/// pseudo-spin coordinates restricted to the disk of radius 2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub field_q: f64,
    pub field_p: f64,
    pub atom_q: f64,
    pub atom_p: f64,
}

impl PhaseState {
    pub const fn new(field_q: f64, field_p: f64, atom_q: f64, atom_p: f64) -> Self {
        Self { field_q, field_p, atom_q, atom_p }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.field_q, self.field_p, self.atom_q, self.atom_p]
    }

    pub fn atom_radius_sq(&self) -> f64 {
        self.atom_q * self.atom_q + self.atom_p * self.atom_p
    }

    /// Time-reversed state: both momenta negated.
    pub fn reversed(self) -> Self {
        Self::new(self.field_q, -self.field_p, self.atom_q, -self.atom_p)
    }

    /// Image under the parity map `(q, Q) -> (-q, -Q)`.
    pub fn parity(self) -> Self {
        Self::new(-self.field_q, self.field_p, -self.atom_q, self.atom_p)
    }

    /// Checks the disk constraint, clamping states that overshoot the edge by
    /// at most `tolerance` back onto it.
    pub fn validated(self, tolerance: f64) -> Result<Self> {
        let r2 = self.atom_radius_sq();
        if !r2.is_finite() || !self.field_q.is_finite() || !self.field_p.is_finite() {
            return Err(DickeError::OutsideDisk { radius_sq: r2 });
        }
        if r2 <= 4.0 {
            Ok(self)
        } else if r2 <= 4.0 + tolerance {
            let scale = 2.0 / r2.sqrt();
            Ok(Self { atom_q: self.atom_q * scale, atom_p: self.atom_p * scale, ..self })
        } else {
            Err(DickeError::OutsideDisk { radius_sq: r2 })
        }
    }
}

/// Energy, atomic inversion `<j_z>/j` and mean photon number of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub energy: f64,
    pub atomic_inversion: f64,
    pub mean_photon: f64,
}

/// Normalized electrical variables of the two coupled LC oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ElectricalState {
    pub i_l1: f64,
    pub v_c1: f64,
    pub i_l2: f64,
    pub v_c2: f64,
}

impl From<PhaseState> for ElectricalState {
    fn from(s: PhaseState) -> Self {
        Self { i_l1: s.field_q, v_c1: s.field_p, i_l2: s.atom_q, v_c2: s.atom_p }
    }
}

impl From<ElectricalState> for PhaseState {
    fn from(e: ElectricalState) -> Self {
        PhaseState::new(e.i_l1, e.v_c1, e.i_l2, e.v_c2)
    }
}

pub fn to_electrical(s: PhaseState) -> ElectricalState {
    s.into()
}

pub fn from_electrical(e: ElectricalState) -> PhaseState {
    e.into()
}

/// Classical energy per particle.
pub fn hamiltonian(params: &ModelParams, s: PhaseState) -> Result<f64> {
    hamiltonian_with_tolerance(params, s, BOUNDARY_TOLERANCE)
}

pub fn hamiltonian_with_tolerance(params: &ModelParams, s: PhaseState, boundary_tol: f64) -> Result<f64> {
    let s = s.validated(boundary_tol)?;
    Ok(energy_unchecked(params, &s.to_array()))
}

/// Energy without the disk check; the radical is clamped at zero.
pub(crate) fn energy_unchecked(params: &ModelParams, y: &[f64; 4]) -> f64 {
    let [q, p, aq, ap] = *y;
    let w = params.omega / params.omega0;
    let radical = (4.0 - ap * ap - aq * aq).max(0.0).sqrt();
    0.5 * w * (q * q + p * p) + 0.5 * (aq * aq + ap * ap) + params.gamma * q * aq / params.omega0 * radical
        - 1.0
        + params.drive() * q
}

/// The same energy written in electrical variables.
pub fn hamiltonian_electrical(params: &ModelParams, e: ElectricalState) -> Result<f64> {
    let r2 = e.i_l2 * e.i_l2 + e.v_c2 * e.v_c2;
    if r2 > 4.0 + BOUNDARY_TOLERANCE {
        return Err(DickeError::OutsideDisk { radius_sq: r2 });
    }
    let radical = (4.0 - e.v_c2 * e.v_c2 - e.i_l2 * e.i_l2).max(0.0).sqrt();
    Ok(params.omega / (2.0 * params.omega0) * (e.i_l1 * e.i_l1 + e.v_c1 * e.v_c1)
        + 0.5 * (e.i_l2 * e.i_l2 + e.v_c2 * e.v_c2)
        + params.gamma * e.i_l1 * e.i_l2 / params.omega0 * radical
        - 1.0
        + params.drive() * e.i_l1)
}

/// Hamilton's equations: time derivatives of `(q, p, Q, P)`.
pub fn flow(params: &ModelParams, s: PhaseState) -> Result<[f64; 4]> {
    flow_array(params, &s.to_array(), SINGULAR_EPSILON)
}

pub fn flow_with_epsilon(params: &ModelParams, s: PhaseState, epsilon: f64) -> Result<[f64; 4]> {
    flow_array(params, &s.to_array(), epsilon)
}

pub(crate) fn flow_array(params: &ModelParams, y: &[f64; 4], epsilon: f64) -> Result<[f64; 4]> {
    let [q, p, aq, ap] = *y;
    let margin = 4.0 - ap * ap - aq * aq;
    // NaN margins fall through to the error as well
    if !(margin >= epsilon) {
        return Err(DickeError::Singular { margin });
    }
    let r = margin.sqrt();
    let w = params.omega / params.omega0;
    let c = params.gamma / params.omega0;
    Ok([
        w * p,
        -c * aq * r - w * q - params.drive(),
        ap - c * ap * q * aq / r,
        c * q * aq * aq / r - c * q * r - aq,
    ])
}

/// Jacobian of [`flow`], rows indexed by the derivative component.
pub fn jacobian(params: &ModelParams, s: PhaseState) -> Result<[[f64; 4]; 4]> {
    let [q, _p, aq, ap] = s.to_array();
    let margin = 4.0 - ap * ap - aq * aq;
    if !(margin >= SINGULAR_EPSILON) {
        return Err(DickeError::Singular { margin });
    }
    let r = margin.sqrt();
    let r3 = r * margin;
    let w = params.omega / params.omega0;
    let c = params.gamma / params.omega0;
    Ok([
        [0.0, w, 0.0, 0.0],
        [-w, 0.0, -c * (r - aq * aq / r), c * aq * ap / r],
        [
            -c * ap * aq / r,
            0.0,
            -c * ap * q * (1.0 / r + aq * aq / r3),
            1.0 - c * q * aq * (1.0 / r + ap * ap / r3),
        ],
        [
            c * (aq * aq / r - r),
            0.0,
            c * q * (3.0 * aq / r + aq * aq * aq / r3) - 1.0,
            c * q * ap * (aq * aq / r3 + 1.0 / r),
        ],
    ])
}

pub fn atomic_inversion(s: &PhaseState) -> f64 {
    s.atom_radius_sq() / 2.0 - 1.0
}

pub fn mean_photon(s: &PhaseState) -> f64 {
    (s.field_q * s.field_q + s.field_p * s.field_p) / 2.0
}

pub fn observables(params: &ModelParams, s: PhaseState) -> Result<Observables> {
    let s = s.validated(BOUNDARY_TOLERANCE)?;
    Ok(Observables {
        energy: energy_unchecked(params, &s.to_array()),
        atomic_inversion: atomic_inversion(&s),
        mean_photon: mean_photon(&s),
    })
}

/// Minimum of the Hamiltonian over the field coordinates at fixed `(Q, P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldMinimum {
    pub value: f64,
    /// Minimizing field position; the minimizing field momentum is zero.
    pub field_q: f64,
}

/// `V(Q, P) = min_{q,p} H`, with the minimizing `q`.
pub fn effective_potential(params: &ModelParams, atom_q: f64, atom_p: f64) -> Result<FieldMinimum> {
    let s = PhaseState::new(0.0, 0.0, atom_q, atom_p).validated(BOUNDARY_TOLERANCE)?;
    Ok(effective_potential_unchecked(params, s.atom_q, s.atom_p))
}

pub(crate) fn effective_potential_unchecked(params: &ModelParams, aq: f64, ap: f64) -> FieldMinimum {
    let a = field_drive(params, aq, ap);
    FieldMinimum {
        value: 0.5 * (aq * aq + ap * ap) - 1.0 - params.omega0 / (2.0 * params.omega) * a * a,
        field_q: -a * params.omega0 / params.omega,
    }
}

/// Coefficient of the term linear in `q` at fixed atomic coordinates.
pub(crate) fn field_drive(params: &ModelParams, aq: f64, ap: f64) -> f64 {
    let radical = (4.0 - aq * aq - ap * ap).max(0.0).sqrt();
    params.gamma * aq * radical / params.omega0 + params.drive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn res(gamma: f64, alpha: f64) -> ModelParams {
        ModelParams::resonant(gamma, alpha).unwrap()
    }

    #[test]
    fn rejects_nonpositive_frequencies() {
        assert!(ModelParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 0.0).is_err());
        assert_abs_diff_eq!(ModelParams::new(4.0, 1.0, 0.0, 0.0).unwrap().gamma_c(), 1.0);
    }

    #[test]
    fn energy_of_origin_without_coupling() {
        assert_eq!(hamiltonian(&res(0.0, 0.0), PhaseState::default()).unwrap(), -1.0);
    }

    #[test]
    fn caption_energies() {
        let cases = [
            (0.5, PhaseState::new(1.32, 0.0, -1.5, 0.0), -1.9993),
            (0.5, PhaseState::new(-6.736, 0.0, 1.5, 0.0), -2.0007),
            (1.5, PhaseState::new(-5.638, 0.0, 1.1, 0.0), -12.0001),
        ];
        for (alpha, s, e) in cases {
            assert_abs_diff_eq!(hamiltonian(&res(1.5, alpha), s).unwrap(), e, epsilon = 2e-3);
        }
    }

    #[test]
    fn boundary_clamp_and_domain_error() {
        let p = res(1.0, 0.3);
        let just_over = PhaseState::new(0.5, 0.0, 2.0 + 1e-13, 0.0);
        let clamped = just_over.validated(BOUNDARY_TOLERANCE).unwrap();
        assert_eq!(clamped.atom_radius_sq(), 4.0);
        assert!(hamiltonian(&p, just_over).is_ok());
        let outside = PhaseState::new(0.0, 0.0, 1.5, 1.5);
        assert!(matches!(hamiltonian(&p, outside), Err(DickeError::OutsideDisk { .. })));
        assert!(hamiltonian_with_tolerance(&p, PhaseState::new(0.0, 0.0, 2.0001, 0.0), 1e-3).is_ok());
    }

    #[test]
    fn flow_of_decoupled_oscillators() {
        let d = flow(&res(0.0, 0.0), PhaseState::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(d, [0.0, -1.0, 1.0, 0.0]);
    }

    #[test]
    fn flow_singular_at_edge() {
        let p = res(1.0, 0.0);
        let edge = PhaseState::new(1.0, 0.0, 0.0, 2.0);
        assert!(matches!(flow(&p, edge), Err(DickeError::Singular { .. })));
        let near = PhaseState::new(1.0, 0.0, 0.0, (4.0 - 1e-6f64).sqrt());
        assert!(flow(&p, near).is_ok());
        assert!(flow_with_epsilon(&p, near, 1e-4).is_err());
    }

    #[test]
    fn flow_matches_finite_difference_at_caption_state() {
        // oracle: central differences of the energy, q' = dH/dp, p' = -dH/dq, ...
        let p = res(1.5, 0.5);
        let s = PhaseState::new(1.32, 0.0, -1.5, 0.0);
        let d = flow(&p, s).unwrap();
        let h = 1e-6;
        let partial = |i: usize| {
            let mut a = s.to_array();
            let mut b = s.to_array();
            a[i] += h;
            b[i] -= h;
            (energy_unchecked(&p, &a) - energy_unchecked(&p, &b)) / (2.0 * h)
        };
        assert_eq!(d[0], 0.0);
        assert_eq!(d[2], 0.0);
        assert_abs_diff_eq!(d[1], -partial(0), epsilon = 1e-8);
        assert_abs_diff_eq!(d[3], -partial(2), epsilon = 1e-8);
    }

    #[test]
    fn jacobian_matches_finite_difference() {
        let p = ModelParams::new(1.3, 0.8, 1.1, -0.4).unwrap();
        let s = PhaseState::new(0.7, -0.3, 0.9, 0.6);
        let jac = jacobian(&p, s).unwrap();
        let h = 1e-6;
        for j in 0..4 {
            let mut a = s.to_array();
            let mut b = s.to_array();
            a[j] += h;
            b[j] -= h;
            let fa = flow_array(&p, &a, SINGULAR_EPSILON).unwrap();
            let fb = flow_array(&p, &b, SINGULAR_EPSILON).unwrap();
            for i in 0..4 {
                assert_abs_diff_eq!(jac[i][j], (fa[i] - fb[i]) / (2.0 * h), epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn observables_at_south_pole_and_edge() {
        let o = observables(&res(0.7, 0.1), PhaseState::default()).unwrap();
        assert_eq!(o.atomic_inversion, -1.0);
        assert_eq!(o.mean_photon, 0.0);
        let edge = PhaseState::new(0.3, 0.1, 1.2, -1.6);
        assert_abs_diff_eq!(observables(&res(0.7, 0.1), edge).unwrap().atomic_inversion, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ground_state_observables_from_closed_form() {
        // gamma = 1, alpha = 0: Q^2 = 2 (1 - gamma_c^2 / gamma^2), q = -gamma Q sqrt(4 - Q^2) / omega
        let aq = (2.0f64 * (1.0 - 0.25)).sqrt();
        let q = -aq * (4.0 - aq * aq).sqrt();
        let o = observables(&res(1.0, 0.0), PhaseState::new(q, 0.0, aq, 0.0)).unwrap();
        assert_abs_diff_eq!(o.atomic_inversion, -0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(o.mean_photon, 1.875, epsilon = 1e-14);
        assert_abs_diff_eq!(o.energy, -2.125, epsilon = 1e-14);
    }

    #[test]
    fn effective_potential_examples() {
        assert_eq!(effective_potential(&res(0.0, 0.0), 0.0, 0.0).unwrap().value, -1.0);
        for sign in [-1.0, 1.0] {
            let v = effective_potential(&res(1.0, 0.0), sign * 1.5f64.sqrt(), 0.0).unwrap();
            assert_abs_diff_eq!(v.value, -2.125, epsilon = 1e-14);
        }
        assert!(effective_potential(&res(1.0, 0.0), 2.0, 1.0).is_err());
    }

    #[test]
    fn electrical_mapping() {
        let s = PhaseState::new(1.32, 0.0, -1.5, 0.0);
        let e = to_electrical(s);
        assert_eq!(e, ElectricalState { i_l1: 1.32, v_c1: 0.0, i_l2: -1.5, v_c2: 0.0 });
        assert_eq!(from_electrical(e), s);
        let p = ModelParams::new(1.2, 0.9, 1.5, 0.5).unwrap();
        let s = PhaseState::new(0.4, -1.1, 0.8, 0.3);
        assert_eq!(hamiltonian_electrical(&p, to_electrical(s)).unwrap(), hamiltonian(&p, s).unwrap());
    }
}
