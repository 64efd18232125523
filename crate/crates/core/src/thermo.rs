//! Thermodynamics of the coupled oscillator at the microcanonical
//! temperature: β(E, γ), global and subsystem entropies, the mean energy of
//! the coupled oscillator, ⟨q²⟩, and one-parameter sweeps.

use crate::error::{Error, Result};
use crate::matsubara;
use crate::qbm::{bath_energy, interaction_energy, log_ztilde_renormalized, d_log_ztilde_renormalized};
use crate::qbm::{EnergyConvention, EnergyValue, ModelParams, QbmModel};
use crate::spa::{find_increasing_root, solve_saddle, CompositeSystem, LogZ, SaddleSolution, SearchOptions};

/// Thermodynamic state at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub beta: f64,
    /// Energy on the renormalized internal scale.
    pub energy: f64,
    /// The same energy in units of ħω₀/2π.
    pub energy_scaled: f64,
    pub s_over_k: f64,
    pub s_a_over_k: f64,
    pub free_energy: f64,
    /// Mean energy of the coupled oscillator, −∂β log Z̃_ren.
    pub e_tilde: f64,
    pub q2: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// log Z of oscillator and bath as a two-term composite.
pub fn qbm_system(model: QbmModel) -> CompositeSystem {
    CompositeSystem::new()
        .with_term("bath", move |b| model.bath_term(b).map(LogZ::from))
        .with_term("oscillator", move |b| model.coupled_term(b).map(LogZ::from))
}

/// β(E, γ) from the renormalized saddle condition. E = 0 is the ground
/// state, β = ∞.
pub fn beta_of_e(energy: EnergyValue, p: &ModelParams) -> Result<SaddleSolution> {
    beta_of_e_with(energy, p, &SearchOptions::default())
}

pub fn beta_of_e_with(energy: EnergyValue, p: &ModelParams, opts: &SearchOptions) -> Result<SaddleSolution> {
    p.validate()?;
    let e = energy.to_internal(p);
    if !(e >= 0.0) || !e.is_finite() {
        return Err(Error::Domain(format!("energy must be finite and >= 0, got {e}")));
    }
    if e == 0.0 {
        return Ok(SaddleSolution::ground_state());
    }
    let model = QbmModel::new(*p)?;
    solve_saddle(&qbm_system(model), e, opts)
}

/// S/K = βE + log Z_AB(β).
pub fn entropy_global(sol: &SaddleSolution) -> f64 {
    if sol.is_ground_state() {
        0.0
    } else {
        sol.entropy_over_k
    }
}

/// S_A/K = log Z̃_ren − β ∂β log Z̃_ren at the solution.
pub fn entropy_subsystem(sol: &SaddleSolution, p: &ModelParams) -> Result<f64> {
    if sol.is_ground_state() {
        return Ok(0.0);
    }
    let roots = p.roots()?;
    let b = sol.beta_star;
    Ok(log_ztilde_renormalized(b, &roots, p)? - b * d_log_ztilde_renormalized(b, &roots, p)?)
}

/// Mean energy of the coupled oscillator above its ground state.
pub fn mean_energy_coupled(sol: &SaddleSolution, p: &ModelParams) -> Result<f64> {
    if sol.is_ground_state() {
        return Ok(0.0);
    }
    let roots = p.roots()?;
    Ok(-d_log_ztilde_renormalized(sol.beta_star, &roots, p)?)
}

/// ⟨q²⟩ at the solution's temperature.
pub fn q_squared(sol: &SaddleSolution, p: &ModelParams) -> Result<f64> {
    q_squared_at(sol.beta_star, p)
}

/// ⟨q²⟩ at a given β (β = ∞ allowed).
pub fn q_squared_at(beta: f64, p: &ModelParams) -> Result<f64> {
    p.validate()?;
    matsubara::q_squared_at(beta, &p.roots()?, p)
}

pub fn thermo_point(energy: EnergyValue, p: &ModelParams) -> Result<ThermoPoint> {
    let sol = beta_of_e(energy, p)?;
    point_from_solution(&sol, p)
}

fn point_from_solution(sol: &SaddleSolution, p: &ModelParams) -> Result<ThermoPoint> {
    let e = sol.energy;
    Ok(ThermoPoint {
        beta: sol.beta_star,
        energy: e,
        energy_scaled: EnergyValue::internal(e).to_scaled(p),
        s_over_k: entropy_global(sol),
        s_a_over_k: entropy_subsystem(sol, p)?,
        free_energy: sol.free_energy(),
        e_tilde: mean_energy_coupled(sol, p)?,
        q2: q_squared(sol, p)?,
        residual: sol.residual,
        iterations: sol.iterations,
    })
}

const FIRST_ORDER_STEP: f64 = 1e-2;

/// ∂γ RHS(β, γ) at γ = 0. RHS vanishes identically at γ = 0, so
/// RHS(β, h)/h is a one-sided difference quotient; two Richardson levels
/// remove its O(h) and O(h²) errors.
pub fn first_order_coefficient(beta: f64, p: &ModelParams) -> Result<f64> {
    let quotient = |h: f64| -> Result<f64> {
        let q = p.with_gamma(h * p.omega0);
        Ok(interaction_energy(beta, &q.roots()?, &q)? / (h * p.omega0))
    };
    let h = FIRST_ORDER_STEP;
    let (d1, d2, d4) = (quotient(h)?, quotient(h / 2.0)?, quotient(h / 4.0)?);
    let r1 = 2.0 * d2 - d1;
    let r2 = 2.0 * d4 - d2;
    Ok((4.0 * r2 - r1) / 3.0)
}

/// β solving the saddle condition with the interaction energy truncated at
/// first order in γ.
pub fn first_order_beta(energy: EnergyValue, p: &ModelParams) -> Result<f64> {
    p.validate()?;
    let e = energy.to_internal(p);
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::Domain(format!("energy must be finite and > 0, got {e}")));
    }
    let opts = SearchOptions::default();
    let tol = opts.tol_abs + opts.tol_rel * e;
    let gamma = p.gamma;
    let root = find_increasing_root(
        |b| {
            let first = if gamma == 0.0 { 0.0 } else { gamma * first_order_coefficient(b, p)? };
            Ok(e - bath_energy(b, p) - first)
        },
        tol,
        &opts,
    )?;
    Ok(root.beta)
}

/// The parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Gamma,
    Energy,
    OmegaD,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub vary: SweepVar,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub log_scale: bool,
    pub params: ModelParams,
    /// Fixed energy; when energy is swept, min and max use its convention.
    pub energy: EnergyValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub params: ModelParams,
    pub energy: EnergyValue,
    pub point: Result<ThermoPoint>,
}

/// `steps` grid values from min to max inclusive.
pub fn grid(min: f64, max: f64, steps: usize, log_scale: bool) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParams(format!("steps must be >= 2, got {steps}")));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(Error::InvalidParams(format!("bad range [{min}, {max}]")));
    }
    if log_scale && !(min > 0.0) {
        return Err(Error::InvalidParams(format!("log grid needs min > 0, got {min}")));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / n;
            if i == steps - 1 {
                max
            } else if log_scale {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect())
}

fn sweep_row(spec: &SweepSpec, index: usize, value: f64) -> SweepRow {
    let mut params = spec.params;
    let mut energy = spec.energy;
    match spec.vary {
        SweepVar::Gamma => params.gamma = value,
        SweepVar::OmegaD => params.omega_d = value,
        SweepVar::Energy => {
            energy = match energy.convention {
                EnergyConvention::Internal => EnergyValue::internal(value),
                EnergyConvention::Scaled => EnergyValue::scaled(value),
            }
        }
    }
    let point = params.validate().and_then(|_| thermo_point(energy, &params));
    SweepRow { index, value, params, energy, point }
}

/// Evaluates one [`ThermoPoint`] per grid value. Failures at single points
/// stay in their rows; only an invalid grid is an error.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let values = grid(spec.min, spec.max, spec.steps, spec.log_scale)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(values.par_iter().enumerate().map(|(i, &v)| sweep_row(spec, i, v)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(values.iter().enumerate().map(|(i, &v)| sweep_row(spec, i, v)).collect())
    }
}
