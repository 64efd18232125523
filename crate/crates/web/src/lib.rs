//! Browser bindings: curves for the demo page.
//!
//! Every curve is sampled on an evenly spaced grid and returned as a flat
//! array; points where the solver fails come back as NaN so the plot can
//! leave a gap.

use microtemp::qbm::{EnergyValue, ModelParams};
use microtemp::thermo::{beta_of_e, grid, q_squared_at, thermo_point};
use wasm_bindgen::prelude::*;

fn params(kappa: f64, wd_ratio: f64) -> Result<ModelParams, String> {
    ModelParams::from_ratios(kappa, wd_ratio, 0.0).map_err(|e| e.to_string())
}

fn axis(max: f64, steps: usize) -> Result<Vec<f64>, String> {
    grid(0.0, max, steps, false).map_err(|e| e.to_string())
}

/// β at each γ in [0, gamma_max].
pub fn beta_vs_gamma(energy: f64, kappa: f64, wd_ratio: f64, gamma_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let p = params(kappa, wd_ratio)?;
    Ok(axis(gamma_max, steps)?
        .into_iter()
        .map(|g| beta_of_e(EnergyValue::scaled(energy), &p.with_gamma(g)).map_or(f64::NAN, |s| s.beta_star))
        .collect())
}

/// Subsystem entropy S_A/K at each E in [0, energy_max].
pub fn entropy_vs_energy(gamma: f64, kappa: f64, wd_ratio: f64, energy_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let p = params(kappa, wd_ratio)?.with_gamma(gamma);
    p.validate().map_err(|e| e.to_string())?;
    Ok(axis(energy_max, steps)?
        .into_iter()
        .map(|e| thermo_point(EnergyValue::scaled(e), &p).map_or(f64::NAN, |pt| pt.s_a_over_k))
        .collect())
}

/// ⟨q²⟩ at each γ in [0, gamma_max].
pub fn q2_vs_gamma(energy: f64, kappa: f64, wd_ratio: f64, gamma_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let p = params(kappa, wd_ratio)?;
    Ok(axis(gamma_max, steps)?
        .into_iter()
        .map(|g| {
            let q = p.with_gamma(g);
            beta_of_e(EnergyValue::scaled(energy), &q)
                .and_then(|s| q_squared_at(s.beta_star, &q))
                .unwrap_or(f64::NAN)
        })
        .collect())
}

#[wasm_bindgen(js_name = betaVsGamma)]
pub fn js_beta_vs_gamma(energy: f64, kappa: f64, wd_ratio: f64, gamma_max: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    beta_vs_gamma(energy, kappa, wd_ratio, gamma_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = entropyVsEnergy)]
pub fn js_entropy_vs_energy(gamma: f64, kappa: f64, wd_ratio: f64, energy_max: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    entropy_vs_energy(gamma, kappa, wd_ratio, energy_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = q2VsGamma)]
pub fn js_q2_vs_gamma(energy: f64, kappa: f64, wd_ratio: f64, gamma_max: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    q2_vs_gamma(energy, kappa, wd_ratio, gamma_max, steps).map_err(|e| JsValue::from_str(&e))
}
