//! Time evolution of the classical flow with energy-drift bookkeeping and an
//! optional additive noise channel.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::equilibria;
use crate::error::{DickeError, Result};
use crate::model::{energy_unchecked, flow_array, ModelParams, PhaseState, BOUNDARY_TOLERANCE, SINGULAR_EPSILON};
use crate::ode::{Dop853, StepControl};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub t_end: f64,
    pub sample_dt: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Per-axis noise amplitude; the kick over a step `h` has standard
    /// deviation `noise_sigma * sqrt(h)`.
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            t_end: 300.0,
            sample_dt: 0.01,
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: 0.1,
            noise_sigma: 0.0,
            rng_seed: 0,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_end", self.t_end),
            ("sample_dt", self.sample_dt),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || v.is_nan() {
                return Err(DickeError::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(DickeError::InvalidConfig(format!("noise_sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if !self.t_end.is_finite() {
            return Err(DickeError::InvalidConfig("t_end must be finite".into()));
        }
        Ok(())
    }

    /// Same configuration with `rel_tol = abs_tol = tol`.
    pub fn with_tol(self, tol: f64) -> Self {
        Self { rel_tol: tol, abs_tol: tol, ..self }
    }

    pub(crate) fn step_control(&self) -> StepControl {
        StepControl { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_step: self.max_step }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: PhaseState,
}

/// Why a run stopped before `t_end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub energies: Vec<f64>,
    /// `max |E(t) - E(0)|` over the samples.
    pub drift: f64,
    pub terminated_early: Option<Termination>,
    /// State at the last integrated time (`t_end` unless terminated early).
    pub final_time: f64,
    pub final_state: PhaseState,
}

impl Trajectory {
    pub fn initial_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn sample_time(k: usize, dt: f64) -> f64 {
    k as f64 * dt
}

/// Integrates the flow from `s0` and resamples on a uniform grid.
pub fn evolve(params: &ModelParams, s0: PhaseState, cfg: &IntegrationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let s0 = s0.validated(BOUNDARY_TOLERANCE)?;
    let p = *params;
    let rhs = move |y: &[f64; 4]| flow_array(&p, y, SINGULAR_EPSILON);

    let e0 = energy_unchecked(params, &s0.to_array());
    let mut samples = vec![Sample { t: 0.0, state: s0 }];
    let mut energies = vec![e0];
    let n_samples = (cfg.t_end / cfg.sample_dt + 1e-9).floor() as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let noisy = cfg.noise_sigma > 0.0;

    let mut solver = match Dop853::new(rhs, 0.0, s0.to_array(), cfg.step_control()) {
        Ok(s) => s,
        Err(e) => {
            return Ok(Trajectory {
                samples,
                energies,
                drift: 0.0,
                terminated_early: Some(Termination { t: 0.0, reason: e.to_string() }),
                final_time: 0.0,
                final_state: s0,
            })
        }
    };

    let mut next = 1usize;
    let mut terminated = None;
    while solver.t() < cfg.t_end {
        if let Err(e) = solver.step(cfg.t_end) {
            terminated = Some(Termination { t: solver.t(), reason: e.to_string() });
            break;
        }
        let dense = solver.dense()?;
        while next <= n_samples && sample_time(next, cfg.sample_dt) <= dense.t_new {
            let t = sample_time(next, cfg.sample_dt);
            let y = if t == dense.t_new { *solver.y() } else { dense.eval(t) };
            samples.push(Sample { t, state: PhaseState::from_array(y) });
            energies.push(energy_unchecked(params, &y));
            next += 1;
        }
        if noisy {
            let h = dense.t_new - dense.t_old;
            let amp = cfg.noise_sigma * h.sqrt();
            let mut y = *solver.y();
            for v in y.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v += amp * z;
            }
            if let Err(e) = solver.reset_state(y) {
                terminated = Some(Termination { t: solver.t(), reason: format!("noise kick: {e}") });
                break;
            }
        }
        let y = solver.y();
        let margin = 4.0 - y[2] * y[2] - y[3] * y[3];
        if margin < SINGULAR_EPSILON {
            terminated = Some(Termination {
                t: solver.t(),
                reason: DickeError::Singular { margin }.to_string(),
            });
            break;
        }
    }

    let drift = energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    Ok(Trajectory {
        samples,
        energies,
        drift,
        terminated_early: terminated,
        final_time: solver.t(),
        final_state: PhaseState::from_array(*solver.y()),
    })
}

/// Evolves from the ground-state equilibrium; with `noise_sigma > 0` this is
/// a noisy hold around the fixed point.
pub fn ground_state_hold(params: &ModelParams, cfg: &IntegrationConfig) -> Result<Trajectory> {
    let ground = equilibria::ground_state(params);
    evolve(params, ground.equilibrium.state, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn res(gamma: f64, alpha: f64) -> ModelParams {
        ModelParams::resonant(gamma, alpha).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(IntegrationConfig::default().validate().is_ok());
        for bad in [
            IntegrationConfig { t_end: 0.0, ..Default::default() },
            IntegrationConfig { sample_dt: -1.0, ..Default::default() },
            IntegrationConfig { rel_tol: 0.0, ..Default::default() },
            IntegrationConfig { noise_sigma: -0.1, ..Default::default() },
            IntegrationConfig { abs_tol: f64::NAN, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(DickeError::InvalidConfig(_))));
        }
    }

    #[test]
    fn harmonic_orbit_closes() {
        let cfg = IntegrationConfig { t_end: 2.0 * PI, ..Default::default() };
        let tr = evolve(&res(0.0, 0.0), PhaseState::new(1.0, 0.0, 0.0, 0.0), &cfg).unwrap();
        assert_eq!(tr.final_time, 2.0 * PI);
        let f = tr.final_state;
        assert_abs_diff_eq!(f.field_q, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(f.field_p, 0.0, epsilon = 1e-6);
        assert_eq!(f.atom_q, 0.0);
        assert_eq!(f.atom_p, 0.0);
    }

    #[test]
    fn samples_are_uniform_and_start_at_initial_state() {
        let cfg = IntegrationConfig { t_end: 1.0, sample_dt: 0.1, ..Default::default() };
        let s0 = PhaseState::new(0.3, 0.0, -0.5, 0.1);
        let tr = evolve(&res(0.8, 0.2), s0, &cfg).unwrap();
        assert_eq!(tr.len(), 11);
        assert_eq!(tr.samples[0].state, s0);
        assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
        assert_abs_diff_eq!(tr.samples[10].t, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_trajectory_at_uncoupled_origin() {
        let cfg = IntegrationConfig { t_end: 10.0, ..Default::default() };
        let tr = evolve(&res(0.0, 0.0), PhaseState::default(), &cfg).unwrap();
        assert!(tr.samples.iter().all(|s| s.state == PhaseState::default()));
        assert_eq!(tr.drift, 0.0);
    }

    #[test]
    fn outside_disk_initial_state_is_an_error() {
        let cfg = IntegrationConfig::default();
        assert!(evolve(&res(1.0, 0.0), PhaseState::new(0.0, 0.0, 2.0, 1.0), &cfg).is_err());
    }

    #[test]
    fn noisy_runs_are_reproducible() {
        let cfg = IntegrationConfig { t_end: 20.0, noise_sigma: 0.01, rng_seed: 42, ..Default::default() };
        let a = ground_state_hold(&res(1.0, 0.155), &cfg).unwrap();
        let b = ground_state_hold(&res(1.0, 0.155), &cfg).unwrap();
        assert_eq!(a, b);
        let c = ground_state_hold(&res(1.0, 0.155), &IntegrationConfig { rng_seed: 43, ..cfg }).unwrap();
        assert_ne!(a.samples, c.samples);
    }
}
