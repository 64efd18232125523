//! Independent checks on the continuum theory: a finite bath of N coupled
//! oscillators diagonalized exactly, and the power-law density of states
//! whose inverse Laplace transform is known in closed form.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::qbm::{EnergyValue, ModelParams, QbmModel, HBAR};
use crate::spa::{solve_saddle, CompositeSystem, LogZ, SaddleSolution, SearchOptions};
use crate::specfun::{bose, log1mexp, log_gamma, ComplexVal};

/// How bath frequencies and couplings are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathScheme {
    /// Modes at equal-weight quantiles of the density κω²e^{−ω/ω_D}/π, each
    /// standing for 2κω_D³/(πN) true modes, with c_n² = 2m_n mγ/κ per true
    /// mode. The whole bath is carried by the discrete modes.
    EqualModeWeight,
    /// Coupled modes at equal-weight quantiles of J(ω)/ω for the Lorentzian
    /// Drude density J = mγω ω_D²/(ω_D² + ω²); the uncoupled bath bulk keeps
    /// its continuum partition function.
    DrudeLorentzian,
}

/// Partition function of the part of the bath that is not coupled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BulkBath {
    /// The continuum term 2κζ(4)/(ħβ)³.
    Continuum,
    /// Each discrete mode counted `weight` times.
    Discrete { weight: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    pub n_modes: usize,
    pub omegas: Vec<f64>,
    pub couplings: Vec<f64>,
    pub masses: Vec<f64>,
    pub scheme: BathScheme,
    pub bulk: BulkBath,
}

impl DiscreteBath {
    /// True bath modes represented by each discrete mode.
    pub fn mode_weight(&self) -> f64 {
        match self.bulk {
            BulkBath::Discrete { weight } => weight,
            BulkBath::Continuum => 1.0,
        }
    }
}

/// Inverse of the regularized lower incomplete gamma P(3, x).
fn inv_gamma3_cdf(u: f64) -> f64 {
    // upper tail form keeps precision for u near 1
    let upper = |x: f64| (-x).exp() * (1.0 + x + 0.5 * x * x);
    let target = 1.0 - u;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while upper(hi) > target {
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = target - upper(x);
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let pdf = 0.5 * x * x * (-x).exp();
        let newton = x - f / pdf;
        let next = if pdf > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * x;
        x = next;
        if done {
            break;
        }
    }
    x
}

/// Builds N bath modes for the continuum model `p`.
pub fn discretize_bath(p: &ModelParams, n_modes: usize, scheme: BathScheme) -> Result<DiscreteBath> {
    p.validate()?;
    if n_modes < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 bath modes, got {n_modes}")));
    }
    let n = n_modes as f64;
    let quantile = |k: usize| (k as f64 + 0.5) / n;
    let masses = vec![1.0; n_modes];
    let (omegas, couplings, bulk): (Vec<f64>, Vec<f64>, BulkBath) = match scheme {
        BathScheme::EqualModeWeight => {
            let weight = 2.0 * p.kappa * p.omega_d.powi(3) / PI / n;
            let omegas: Vec<f64> = (0..n_modes).map(|k| p.omega_d * inv_gamma3_cdf(quantile(k))).collect();
            let c = (weight * 2.0 * p.mass * p.gamma / p.kappa).sqrt();
            (omegas, vec![c; n_modes], BulkBath::Discrete { weight })
        }
        BathScheme::DrudeLorentzian => {
            let w = p.mass * p.gamma * p.omega_d * PI / (2.0 * n);
            let omegas: Vec<f64> = (0..n_modes).map(|k| p.omega_d * (0.5 * PI * quantile(k)).tan()).collect();
            let couplings = omegas.iter().map(|&om| (2.0 * om * om * w / PI).sqrt()).collect();
            (omegas, couplings, BulkBath::Continuum)
        }
    };
    Ok(DiscreteBath { n_modes, omegas, couplings, masses, scheme, bulk })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalModes {
    /// Ω_k, ascending.
    pub frequencies: Vec<f64>,
}

/// Mass-weighted stiffness matrix of oscillator plus discrete bath.
pub fn dynamical_matrix(bath: &DiscreteBath, p: &ModelParams) -> DMatrix<f64> {
    let n = bath.n_modes;
    let mut d = DMatrix::zeros(n + 1, n + 1);
    let mut d00 = p.omega0 * p.omega0;
    for k in 0..n {
        let (w, c, mk) = (bath.omegas[k], bath.couplings[k], bath.masses[k]);
        d00 += c * c / (p.mass * mk * w * w);
        let off = -c / (p.mass * mk).sqrt();
        d[(0, k + 1)] = off;
        d[(k + 1, 0)] = off;
        d[(k + 1, k + 1)] = w * w;
    }
    d[(0, 0)] = d00;
    d
}

pub fn normal_modes(bath: &DiscreteBath, p: &ModelParams) -> Result<NormalModes> {
    let eig = SymmetricEigen::try_new(dynamical_matrix(bath, p), 1e-15, 10_000)
        .ok_or_else(|| Error::NumericalFailure("symmetric eigensolve did not converge".into()))?;
    let mut sq: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    sq.sort_by(|a, b| a.total_cmp(b));
    if let Some(&bad) = sq.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::NumericalFailure(format!("non-positive squared frequency {bad:e}")));
    }
    Ok(NormalModes { frequencies: sq.into_iter().map(f64::sqrt).collect() })
}

/// −log(1 − e^{−βħΩ}) and its first two β-derivatives.
fn mode_log_z(beta: f64, omega: f64) -> [f64; 3] {
    let e = HBAR * omega;
    let n = bose(beta * e);
    [-log1mexp(beta * e), -e * n, e * e * n * (1.0 + n)]
}

/// Renormalized log Z of the finite system: bulk bath, plus the normal
/// modes, minus the uncoupled discrete modes and the bare oscillator.
pub fn finite_n_log_z(beta: f64, modes: &NormalModes, bath: &DiscreteBath, p: &ModelParams) -> Result<LogZ> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
    }
    let mut acc = [0.0; 3];
    let mut add = |v: [f64; 3], s: f64| {
        for i in 0..3 {
            acc[i] += s * v[i];
        }
    };
    match bath.bulk {
        BulkBath::Continuum => add(QbmModel::new(*p)?.bath_term(beta)?, 1.0),
        BulkBath::Discrete { weight } => {
            for &w in &bath.omegas {
                add(mode_log_z(beta, w), weight);
            }
        }
    }
    for &om in &modes.frequencies {
        add(mode_log_z(beta, om), 1.0);
    }
    for &w in &bath.omegas {
        add(mode_log_z(beta, w), -1.0);
    }
    add(mode_log_z(beta, p.omega0), -1.0);
    Ok(LogZ::from(acc))
}

/// β_N(E) from the saddle of the exact finite-N partition function.
pub fn finite_n_beta(modes: &NormalModes, bath: &DiscreteBath, energy: EnergyValue, p: &ModelParams) -> Result<SaddleSolution> {
    let e = energy.to_internal(p);
    if !(e >= 0.0) || !e.is_finite() {
        return Err(Error::Domain(format!("energy must be finite and >= 0, got {e}")));
    }
    if e == 0.0 {
        return Ok(SaddleSolution::ground_state());
    }
    let (modes, bath, p) = (modes.clone(), bath.clone(), *p);
    let system = CompositeSystem::new().with_term("finite bath", move |b| finite_n_log_z(b, &modes, &bath, &p));
    solve_saddle(&system, e, &SearchOptions::default())
}

/// log[E^{a−1}/Γ(a)], the exact log DOS of log Z = −a log β.
pub fn exact_dos_power_law(a: f64, energy: f64) -> Result<f64> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::Domain(format!("exponent must be > 1, got {a}")));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::Domain(format!("energy must be > 0, got {energy}")));
    }
    Ok((a - 1.0) * energy.ln() - log_gamma(ComplexVal::new(a, 0.0))?.re)
}
