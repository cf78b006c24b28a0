//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function has a plain Rust twin in [`api`] that returns
//! `Result<_, String>`, so the logic can be tested off the browser.

use wasm_bindgen::prelude::*;

pub mod api;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Effective potential on a `resolution x resolution` grid over the disk,
/// row-major in `P`; NaN outside the disk.
#[wasm_bindgen]
pub fn potential_map(gamma: f64, alpha: f64, resolution: usize) -> Result<Vec<f64>, JsError> {
    api::potential_map(gamma, alpha, resolution).map_err(js)
}

/// Wells, saddle and critical deformation as a JSON string.
#[wasm_bindgen]
pub fn well_summary(gamma: f64, alpha: f64) -> Result<String, JsError> {
    api::well_summary(gamma, alpha).map_err(js)
}

/// Orbit launched at `(Q, P)` with the field at rest on its minimum plus
/// `excess` energy in the field momentum. Flat `[t, q, p, Q, P, E]` records.
#[wasm_bindgen]
pub fn trajectory(gamma: f64, alpha: f64, atom_q: f64, atom_p: f64, excess: f64, t_end: f64) -> Result<Vec<f64>, JsError> {
    api::trajectory(gamma, alpha, atom_q, atom_p, excess, t_end).map_err(js)
}

/// `(gamma, alpha_c)` pairs; `alpha_c` is NaN where there is no double well.
#[wasm_bindgen]
pub fn critical_line(gamma_lo: f64, gamma_hi: f64, count: usize) -> Result<Vec<f64>, JsError> {
    api::critical_line(gamma_lo, gamma_hi, count).map_err(js)
}
