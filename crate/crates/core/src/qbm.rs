//! Quantum Brownian motion with a Drude bath: model parameters, the
//! analytically continued log-partition functions and the saddle function
//! whose root is the statistical temperature β(E, γ).
//!
//! Internal units set ħ = K = 1; energies reported in scaled units are
//! E/(ħω₀/2π).

use std::f64::consts::PI;

use crate::cubic::{solve_drude_cubic, CubicRoots};
use crate::error::{Error, Result};
use crate::specfun::{
    bose, coth_stable, digamma, log1mexp, log_gamma, stirling_remainder,
    stirling_remainder_deriv, stirling_remainder_deriv2, ComplexVal, ZETA4,
};

/// Reduced Planck constant in internal units.
pub const HBAR: f64 = 1.0;
/// Boltzmann constant in internal units.
pub const KBOLTZ: f64 = 1.0;

const IMAG_TOL: f64 = 1e-10;

/// Physical parameters of the oscillator-plus-bath model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Damping parameter γ (frequency).
    pub gamma: f64,
    /// Bare oscillator frequency ω₀.
    pub omega0: f64,
    /// Drude cutoff ω_D.
    pub omega_d: f64,
    /// Bath spectral weight κ (frequency⁻³).
    pub kappa: f64,
    /// Central oscillator mass m.
    pub mass: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, omega0: f64, omega_d: f64, kappa: f64, mass: f64) -> Result<Self> {
        let p = Self { gamma, omega0, omega_d, kappa, mass };
        p.validate()?;
        Ok(p)
    }

    /// Dimensionless parameters
    /// κω₀³, ω_D/ω₀ and γ/ω₀, with ω₀ = m = 1.
    pub fn from_ratios(kappa_w0_cubed: f64, wd_over_w0: f64, gamma_over_w0: f64) -> Result<Self> {
        Self::new(gamma_over_w0, 1.0, wd_over_w0, kappa_w0_cubed, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega0", self.omega0),
            ("omegaD", self.omega_d),
            ("kappa", self.kappa),
            ("mass", self.mass),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_omega_d(self, omega_d: f64) -> Self {
        Self { omega_d, ..self }
    }

    /// Bath spectral density I(ω) = κω²e^{−ω/ω_D}.
    pub fn bath_density(&self, omega: f64) -> f64 {
        self.kappa * omega * omega * (-omega / self.omega_d).exp()
    }

    /// Coupling spectral density J(ω) = mγωe^{−ω/ω_D}.
    pub fn coupling_density(&self, omega: f64) -> f64 {
        self.mass * self.gamma * omega * (-omega / self.omega_d).exp()
    }

    /// Zero-point energy of the bath, E₀ = 3κħω_D⁴.
    pub fn bath_zero_point(&self) -> f64 {
        3.0 * self.kappa * HBAR * self.omega_d.powi(4)
    }

    /// Roots of the Drude cubic for these parameters.
    pub fn roots(&self) -> Result<CubicRoots> {
        self.validate()?;
        solve_drude_cubic(self.omega0, self.omega_d, self.gamma)
    }

    /// The scaled energy unit ħω₀/2π in internal units.
    pub fn scaled_energy_unit(&self) -> f64 {
        HBAR * self.omega0 / (2.0 * PI)
    }
}

/// Energy scale in which a value was given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyConvention {
    /// Internal units (ħ = 1).
    Internal,
    /// Units of ħω₀/2π.
    Scaled,
}

/// An energy on the renormalized scale (coupled ground state at zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyValue {
    pub value: f64,
    pub convention: EnergyConvention,
}

impl EnergyValue {
    pub fn internal(value: f64) -> Self {
        Self { value, convention: EnergyConvention::Internal }
    }

    pub fn scaled(value: f64) -> Self {
        Self { value, convention: EnergyConvention::Scaled }
    }

    pub fn to_internal(self, p: &ModelParams) -> f64 {
        match self.convention {
            EnergyConvention::Internal => self.value,
            EnergyConvention::Scaled => self.value * p.scaled_energy_unit(),
        }
    }

    pub fn to_scaled(self, p: &ModelParams) -> f64 {
        match self.convention {
            EnergyConvention::Internal => self.value / p.scaled_energy_unit(),
            EnergyConvention::Scaled => self.value,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")))
    }
}

/// Takes the real part of a conjugate-pair sum after checking that the
/// imaginary residue is negligible against `scale`.
fn real_part(z: ComplexVal, scale: f64, what: &str) -> Result<f64> {
    if z.im.abs() <= IMAG_TOL * (z.re.abs() + scale) {
        Ok(z.re)
    } else {
        Err(Error::NumericalFailure(format!("{what} has imaginary residue {}", z.im)))
    }
}

fn reduced(beta: f64, rate: ComplexVal) -> ComplexVal {
    rate * (HBAR * beta / (2.0 * PI))
}

/// log Z_B(β) = −βE₀ + 2κζ(4)/(ħβ)³.
pub fn log_zb(beta: f64, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    Ok(-beta * p.bath_zero_point() + log_zb_thermal(beta, p))
}

/// Thermal part of log Z_B, 2κζ(4)/(ħβ)³.
pub fn log_zb_thermal(beta: f64, p: &ModelParams) -> f64 {
    2.0 * p.kappa * ZETA4 / (HBAR * beta).powi(3)
}

/// Ground-state shift of the coupled oscillator,
/// ε₀ = (ħ/2π) Σᵢ λᵢ log(ω_D/λᵢ).
pub fn epsilon0(roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    let mut acc = ComplexVal::new(0.0, 0.0);
    let mut scale = 0.0;
    for l in roots.as_array() {
        let term = l * (ComplexVal::new(p.omega_d, 0.0) / l).ln();
        scale += term.norm();
        acc += term;
    }
    Ok(HBAR / (2.0 * PI) * real_part(acc, scale, "epsilon0")?)
}

/// Unrenormalized log Z̃(β) = log(ħβω₀/4π²) + Σ log Γ(ħβλᵢ/2π) − log Γ(ħβω_D/2π).
pub fn log_ztilde(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    let mut acc = ComplexVal::new(0.0, 0.0);
    let mut scale = 0.0;
    for l in roots.as_array() {
        let t = log_gamma(reduced(beta, l))?;
        scale += t.norm();
        acc += t;
    }
    let d = log_gamma(reduced(beta, ComplexVal::new(p.omega_d, 0.0)))?;
    let gamma_sum = real_part(acc, scale, "log Gamma sum")?;
    Ok((HBAR * beta * p.omega0 / (4.0 * PI * PI)).ln() + gamma_sum - d.re)
}

/// Renormalized log(Z̃ e^{βε₀}).
///
/// Evaluated as Σᵢ R(ħβλᵢ/2π) − R(ħβω_D/2π) with R the Stirling remainder;
/// the Stirling leading parts of the Gamma functions cancel exactly against
/// log(ħβω₀/4π²) + βε₀ through the Vieta relations.
pub fn log_ztilde_renormalized(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    remainder_sum(beta, roots, p, |z| stirling_remainder(z), |_| ComplexVal::new(1.0, 0.0))
}

/// d/dβ of [`log_ztilde_renormalized`]; minus the mean energy of the coupled
/// oscillator on the renormalized scale.
pub fn d_log_ztilde_renormalized(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    remainder_sum(beta, roots, p, |z| stirling_remainder_deriv(z), |l| l * (HBAR / (2.0 * PI)))
}

/// d²/dβ² of [`log_ztilde_renormalized`].
pub fn d2_log_ztilde_renormalized(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    remainder_sum(beta, roots, p, |z| stirling_remainder_deriv2(z), |l| {
        let f = l * (HBAR / (2.0 * PI));
        f * f
    })
}

fn remainder_sum(
    beta: f64,
    roots: &CubicRoots,
    p: &ModelParams,
    r: impl Fn(ComplexVal) -> Result<ComplexVal>,
    weight: impl Fn(ComplexVal) -> ComplexVal,
) -> Result<f64> {
    let mut acc = ComplexVal::new(0.0, 0.0);
    let mut scale = 0.0;
    for l in roots.as_array() {
        let t = weight(l) * r(reduced(beta, l))?;
        scale += t.norm();
        acc += t;
    }
    let wd = ComplexVal::new(p.omega_d, 0.0);
    let d = weight(wd) * r(reduced(beta, wd))?;
    scale += d.norm();
    real_part(acc - d, scale, "renormalized log Z~")
}

/// log Z_A(β) = −log(2 sinh(βħω₀/2)) of the bare central oscillator.
pub fn log_za_bare(beta: f64, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    let x = beta * HBAR * p.omega0;
    Ok(-0.5 * x - log1mexp(x))
}

/// Right-hand side of the renormalized saddle equation: the interaction
/// energy 1/β + (ħ/2π){ω_D ψ(1+ħβω_D/2π) − ω_D log ω_D}
/// − (ħ/2π)Σᵢ(λᵢψ(1+ħβλᵢ/2π) − λᵢ log λᵢ) − (ħω₀/2)coth(βħω₀/2) + ħω₀/2.
pub fn interaction_energy(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    let one = ComplexVal::new(1.0, 0.0);
    let wd = ComplexVal::new(p.omega_d, 0.0);
    let bath = wd * digamma(one + reduced(beta, wd))? - wd * wd.ln();
    let mut sum = ComplexVal::new(0.0, 0.0);
    let mut scale = bath.norm();
    for l in roots.as_array() {
        let t = l * digamma(one + reduced(beta, l))? - l * l.ln();
        scale += t.norm();
        sum += t;
    }
    let braces = real_part(bath - sum, scale, "interaction energy")?;
    let x = beta * HBAR * p.omega0;
    // −(ħω₀/2)coth(x/2) + ħω₀/2 written as −ħω₀/(e^x − 1)
    let bare = if x < 1e-3 {
        -0.5 * HBAR * p.omega0 * (coth_stable(0.5 * x)? - 1.0)
    } else {
        -HBAR * p.omega0 * bose(x)
    };
    Ok(1.0 / beta + HBAR / (2.0 * PI) * braces + bare)
}

/// Bath energy at inverse temperature β, 6κζ(4)/(ħ³β⁴).
pub fn bath_energy(beta: f64, p: &ModelParams) -> f64 {
    6.0 * p.kappa * ZETA4 / (HBAR.powi(3) * beta.powi(4))
}

/// f(β) = E − 6κζ(4)/(ħ³β⁴) − RHS(β); its positive root is β(E, γ).
pub fn saddle_function(beta: f64, energy: EnergyValue, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    let e = energy.to_internal(p);
    if !(e >= 0.0) {
        return Err(Error::Domain(format!("energy must be >= 0 on the renormalized scale, got {e}")));
    }
    Ok(e - bath_energy(beta, p) - interaction_energy(beta, roots, p)?)
}

/// Residual of the saddle condition before ground-state renormalization,
/// E − E₀ − 6κζ(4)/(ħ³β⁴) − [1/β − (ħω₀/2)coth(βħω₀/2)
/// + (ħ/2π){ω_D ψ(1+ħβω_D/2π) − Σᵢ λᵢ ψ(1+ħβλᵢ/2π)}], with E on the bare scale.
pub fn saddle_function_bare(beta: f64, energy: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    let one = ComplexVal::new(1.0, 0.0);
    let wd = ComplexVal::new(p.omega_d, 0.0);
    let mut braces = wd * digamma(one + reduced(beta, wd))?;
    let mut scale = braces.norm();
    for l in roots.as_array() {
        let t = l * digamma(one + reduced(beta, l))?;
        scale += t.norm();
        braces -= t;
    }
    let braces = real_part(braces, scale, "bare interaction energy")?;
    let x = beta * HBAR * p.omega0;
    let rhs = 1.0 / beta - 0.5 * HBAR * p.omega0 * coth_stable(0.5 * x)? + HBAR / (2.0 * PI) * braces;
    Ok(energy - p.bath_zero_point() - bath_energy(beta, p) - rhs)
}

/// Shift taking a bare-scale total energy to the renormalized scale:
/// E_ren = E_bare − (E₀ + ε₀ − ħω₀/2).
pub fn renormalization_shift(roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    Ok(p.bath_zero_point() + epsilon0(roots, p)? - 0.5 * HBAR * p.omega0)
}

/// The model with its cubic roots solved once.
#[derive(Debug, Clone, Copy)]
pub struct QbmModel {
    pub params: ModelParams,
    pub roots: CubicRoots,
}

impl QbmModel {
    pub fn new(params: ModelParams) -> Result<Self> {
        let roots = params.roots()?;
        Ok(Self { params, roots })
    }

    /// Renormalized log Z_AB = 2κζ(4)/(ħβ)³ + log Z̃_ren − log Z_A,ren with
    /// first and second β-derivatives. Its derivative is exactly −E on the
    /// solution of [`saddle_function`].
    pub fn log_z_total(&self, beta: f64) -> Result<[f64; 3]> {
        let [b0, b1, b2] = self.bath_term(beta)?;
        let [c0, c1, c2] = self.coupled_term(beta)?;
        Ok([b0 + c0, b1 + c1, b2 + c2])
    }

    /// Thermal bath term with the zero-point energy removed.
    pub fn bath_term(&self, beta: f64) -> Result<[f64; 3]> {
        check_beta(beta)?;
        let p = &self.params;
        let k = p.kappa * ZETA4 / HBAR.powi(3);
        Ok([2.0 * k / beta.powi(3), -6.0 * k / beta.powi(4), 24.0 * k / beta.powi(5)])
    }

    /// Coupled oscillator minus the bare one, both renormalized so their
    /// ground states sit at zero. The first derivative is −RHS evaluated in
    /// the digamma form of the saddle equation.
    pub fn coupled_term(&self, beta: f64) -> Result<[f64; 3]> {
        let (p, r) = (&self.params, &self.roots);
        let x = beta * HBAR * p.omega0;
        let n = bose(x);
        let bare = -log1mexp(x);
        let bare_d2 = (HBAR * p.omega0).powi(2) * n * (1.0 + n);
        Ok([
            log_ztilde_renormalized(beta, r, p)? - bare,
            -interaction_energy(beta, r, p)?,
            d2_log_ztilde_renormalized(beta, r, p)? - bare_d2,
        ])
    }

    pub fn saddle_function(&self, beta: f64, energy: EnergyValue) -> Result<f64> {
        saddle_function(beta, energy, &self.roots, &self.params)
    }
}
