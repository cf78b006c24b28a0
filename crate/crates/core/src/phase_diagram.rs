//! Parameter-space analysis: the critical deformation line, ground-state
//! sweeps and the `(gamma, alpha)` well-count diagram.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::{ground_state, well_count, well_structure};
use crate::error::{DickeError, Result};
use crate::model::{atomic_inversion, effective_potential_unchecked, mean_photon, ModelParams};

/// Initial upper end of the bisection bracket for the critical deformation.
pub const ALPHA_BRACKET: f64 = 2.5;
/// Bisection stops once the bracket is narrower than this.
pub const ALPHA_C_TOLERANCE: f64 = 1e-7;

/// Deformation at which the second well disappears, or `None` when
/// `|gamma| <= gamma_c` and there is never a second well.
pub fn critical_alpha(base: &ModelParams, gamma: f64) -> Option<f64> {
    let params = base.with_gamma(gamma);
    if gamma.abs() <= params.gamma_c() || well_count(&params.with_alpha(0.0)) < 2 {
        return None;
    }
    let mut lo = 0.0;
    let mut hi = ALPHA_BRACKET;
    while well_count(&params.with_alpha(hi)) >= 2 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    while hi - lo > ALPHA_C_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if well_count(&params.with_alpha(mid)) >= 2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Gamma,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ModelParams,
    /// The parameter being varied; the other one is taken from `base`.
    pub varied: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(DickeError::InvalidConfig(format!("sweep range needs lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.count < 2 {
            return Err(DickeError::InvalidConfig(format!("sweep count must be >= 2, got {}", self.count)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.count)
    }

    pub fn params_at(&self, v: f64) -> ModelParams {
        match self.varied {
            SweepAxis::Gamma => self.base.with_gamma(v),
            SweepAxis::Alpha => self.base.with_alpha(v),
        }
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub varied: f64,
    pub field_q: f64,
    pub atom_q: f64,
    pub atomic_inversion: f64,
    pub mean_photon: f64,
    pub energy: f64,
}

pub fn ground_state_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(par_map(spec.values(), |v| {
        let g = ground_state(&spec.params_at(v)).equilibrium;
        SweepRow {
            varied: v,
            field_q: g.state.field_q,
            atom_q: g.state.atom_q,
            atomic_inversion: atomic_inversion(&g.state),
            mean_photon: mean_photon(&g.state),
            energy: g.energy,
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramCell {
    pub gamma: f64,
    pub alpha: f64,
    pub well_count: usize,
    pub ground_energy: f64,
    pub esqpt_energy: Option<f64>,
    pub second_well_energy: Option<f64>,
    pub degenerate: bool,
    pub alpha_c_here: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = Self { lo, hi, count };
        SweepSpec { base: ModelParams::resonant(0.0, 0.0)?, varied: SweepAxis::Gamma, lo, hi, count }.validate()?;
        Ok(axis)
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    /// Row-major: all `alpha` values for the first `gamma`, then the next.
    pub cells: Vec<PhaseDiagramCell>,
    /// `(gamma, alpha_c)` for every `gamma` column; the boundary at negative
    /// deformation is `-alpha_c`.
    pub critical_line: Vec<(f64, Option<f64>)>,
}

impl PhaseDiagram {
    /// The critical line traced for both signs of `alpha`, as polylines.
    pub fn boundary_polylines(&self) -> [Vec<(f64, f64)>; 2] {
        let upper: Vec<(f64, f64)> = self.critical_line.iter().filter_map(|&(g, a)| a.map(|a| (g, a))).collect();
        let lower = upper.iter().map(|&(g, a)| (g, -a)).collect();
        [upper, lower]
    }
}

fn cell(base: &ModelParams, gamma: f64, alpha: f64, alpha_c: Option<f64>) -> PhaseDiagramCell {
    let params = base.with_gamma(gamma).with_alpha(alpha);
    let ws = well_structure(&params);
    let degenerate = ws.minima.len() == 2
        && (ws.minima[0].energy - ws.minima[1].energy).abs() <= crate::equilibria::DEGENERACY_TOLERANCE;
    PhaseDiagramCell {
        gamma,
        alpha,
        well_count: ws.well_count(),
        ground_energy: ws.ground.energy,
        esqpt_energy: ws.esqpt_energy,
        second_well_energy: ws.second_well_energy,
        degenerate,
        alpha_c_here: alpha_c,
    }
}

pub fn classify_grid(base: &ModelParams, gammas: GridAxis, alphas: GridAxis) -> PhaseDiagram {
    let gs = gammas.values();
    let als = alphas.values();
    let critical_line: Vec<(f64, Option<f64>)> = par_map(gs, |g| (g, critical_alpha(base, g)));
    let cells = par_map((0..critical_line.len() * als.len()).collect(), |idx| {
        let (g, ac) = critical_line[idx / als.len()];
        cell(base, g, als[idx % als.len()], ac)
    });
    PhaseDiagram { cells, critical_line }
}

/// Marks the `(Q, P)` grid nodes whose effective potential lies at or below `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBitmap {
    /// Nodes per side; node `(i, j)` sits at `Q = -2 + 4 i/(n-1)`, `P = -2 + 4 j/(n-1)`.
    pub resolution: usize,
    /// Row-major over `P` then `Q`: index `j * resolution + i`.
    pub mask: Vec<bool>,
    /// The disk edge is a single point (the pole) of the Bloch sphere; when
    /// it is accessible, every piece of the region touching the edge is one
    /// component.
    pub rim_accessible: bool,
}

impl RegionBitmap {
    pub fn coordinate(&self, i: usize) -> f64 {
        -2.0 + 4.0 * i as f64 / (self.resolution - 1) as f64
    }

    pub fn spacing(&self) -> f64 {
        4.0 / (self.resolution - 1) as f64
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.resolution + i]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Connected-component labels (4-neighbourhood, plus the edge
    /// identification above); 0 is outside the region.
    pub fn components(&self) -> (usize, Vec<u32>) {
        let n = self.resolution;
        let mut labels = vec![0u32; n * n];
        let mut next = 0u32;
        let mut stack = Vec::new();
        for start in 0..n * n {
            if !self.mask[start] || labels[start] != 0 {
                continue;
            }
            next += 1;
            labels[start] = next;
            stack.push(start);
            while let Some(idx) = stack.pop() {
                for k in self.neighbours(idx).into_iter().flatten() {
                    if self.mask[k] && labels[k] == 0 {
                        labels[k] = next;
                        stack.push(k);
                    }
                }
            }
        }
        if !self.rim_accessible || next < 2 {
            return (next as usize, labels);
        }
        let mut on_rim = vec![false; next as usize + 1];
        for idx in 0..n * n {
            if labels[idx] != 0 && self.touches_rim(idx) {
                on_rim[labels[idx] as usize] = true;
            }
        }
        // merge every rim component into the first one, then compact
        let mut map: Vec<u32> = (0..=next).collect();
        let first_rim = (1..=next).find(|&l| on_rim[l as usize]);
        if let Some(root) = first_rim {
            for l in 1..=next {
                if on_rim[l as usize] {
                    map[l as usize] = root;
                }
            }
        }
        let mut compact = vec![0u32; next as usize + 1];
        let mut count = 0u32;
        for l in 1..=next as usize {
            let target = map[l] as usize;
            if compact[target] == 0 {
                count += 1;
                compact[target] = count;
            }
            compact[l] = compact[target];
        }
        for l in labels.iter_mut() {
            *l = compact[*l as usize];
        }
        (count as usize, labels)
    }

    fn neighbours(&self, idx: usize) -> [Option<usize>; 4] {
        let n = self.resolution;
        let (i, j) = (idx % n, idx / n);
        [
            (i > 0).then(|| idx - 1),
            (i + 1 < n).then(|| idx + 1),
            (j > 0).then(|| idx - n),
            (j + 1 < n).then(|| idx + n),
        ]
    }

    fn inside_disk(&self, idx: usize) -> bool {
        let n = self.resolution;
        let (aq, ap) = (self.coordinate(idx % n), self.coordinate(idx / n));
        aq * aq + ap * ap <= 4.0
    }

    /// A node with a neighbour outside the disk (or off the grid).
    fn touches_rim(&self, idx: usize) -> bool {
        self.neighbours(idx).iter().any(|k| k.is_none_or(|k| !self.inside_disk(k)))
    }

    pub fn component_count(&self) -> usize {
        self.components().0
    }
}

pub fn accessible_region(params: &ModelParams, energy: f64, resolution: usize) -> Result<RegionBitmap> {
    if resolution < 2 {
        return Err(DickeError::InvalidConfig(format!("resolution must be >= 2, got {resolution}")));
    }
    let coords = linspace(-2.0, 2.0, resolution);
    let mask = par_map((0..resolution * resolution).collect(), |idx| {
        let (aq, ap) = (coords[idx % resolution], coords[idx / resolution]);
        aq * aq + ap * ap <= 4.0 && effective_potential_unchecked(params, aq, ap).value <= energy
    });
    let rim_accessible = effective_potential_unchecked(params, 2.0, 0.0).value <= energy;
    Ok(RegionBitmap { resolution, mask, rim_accessible })
}

/// Effective potential sampled on the same node layout as [`RegionBitmap`];
/// nodes outside the disk hold NaN.
pub fn potential_map(params: &ModelParams, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 2 {
        return Err(DickeError::InvalidConfig(format!("resolution must be >= 2, got {resolution}")));
    }
    let coords = linspace(-2.0, 2.0, resolution);
    Ok(par_map((0..resolution * resolution).collect(), |idx| {
        let (aq, ap) = (coords[idx % resolution], coords[idx / resolution]);
        if aq * aq + ap * ap <= 4.0 {
            effective_potential_unchecked(params, aq, ap).value
        } else {
            f64::NAN
        }
    }))
}

/// Order-preserving map, spread over the rayon pool when `parallel` is on.
#[cfg(feature = "parallel")]
fn par_map<T: Send, U: Send>(items: Vec<T>, f: impl Fn(T) -> U + Sync + Send) -> Vec<U> {
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, U>(items: Vec<T>, f: impl Fn(T) -> U) -> Vec<U> {
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(gamma: f64, alpha: f64) -> ModelParams {
        ModelParams::resonant(gamma, alpha).unwrap()
    }

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(-0.5, 0.5, 201);
        assert_eq!(v[0], -0.5);
        assert_eq!(v[100], 0.0);
        assert_eq!(v[200], 0.5);
    }

    #[test]
    fn no_critical_alpha_in_normal_phase() {
        assert_eq!(critical_alpha(&res(0.0, 0.0), 0.4), None);
        assert_eq!(critical_alpha(&res(0.0, 0.0), 0.5), None);
    }

    #[test]
    fn sweep_validation() {
        let base = res(1.0, 0.0);
        let bad = SweepSpec { base, varied: SweepAxis::Alpha, lo: 0.5, hi: -0.5, count: 10 };
        assert!(bad.validate().is_err());
        assert!(SweepSpec { count: 1, lo: -0.5, hi: 0.5, ..bad }.validate().is_err());
    }

    #[test]
    fn empty_region_below_ground() {
        let p = res(1.5, 0.5);
        let e0 = ground_state(&p).equilibrium.energy;
        assert_eq!(accessible_region(&p, e0 - 1e-3, 101).unwrap().count(), 0);
        assert_eq!(accessible_region(&p, 10.0, 101).unwrap().component_count(), 1);
        assert!(accessible_region(&p, 0.0, 1).is_err());
    }

    #[test]
    fn components_split_and_join() {
        let mask = vec![true, false, true, true, false, true, true, true, true];
        let b = RegionBitmap { resolution: 3, mask, rim_accessible: false };
        assert_eq!(b.component_count(), 1);
        let split = vec![true, false, true, true, false, true, false, false, false];
        let b = RegionBitmap { resolution: 3, mask: split.clone(), rim_accessible: false };
        assert_eq!(b.component_count(), 2);
        // both pieces reach the grid edge, so they meet at the pole
        let b = RegionBitmap { resolution: 3, mask: split, rim_accessible: true };
        assert_eq!(b.component_count(), 1);
    }
}
