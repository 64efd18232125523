//! Position variance of the damped oscillator from its Matsubara series
//!
//! ⟨q²⟩ = (1/mβ) Σ_{n∈ℤ} [ν_n² + ω₀² + |ν_n| γω_D/(ω_D + |ν_n|)]⁻¹,
//! ν_n = 2πn/ħβ.
//!
//! Terms are summed explicitly up to N₀, where ν_{N₀} is four times the
//! largest |λᵢ|. Beyond that the summand has a convergent Laurent expansion
//! in 1/ν, which gives the tail integral and the Euler–Maclaurin endpoint
//! corrections in closed form.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::cubic::CubicRoots;
use crate::error::{Error, Result};
use crate::qbm::{ModelParams, HBAR};

const LAURENT_TERMS: usize = 48;
const MIN_EXPLICIT: usize = 32;
const TAIL_RADIUS: f64 = 4.0;
const GL_ORDER: usize = 20;

/// Summand for ν ≥ 0, (ω_D + ν)/[(ν² + ω₀²)(ω_D + ν) + νγω_D].
fn summand(nu: f64, p: &ModelParams) -> f64 {
    let wd = p.omega_d;
    let w2 = p.omega0 * p.omega0;
    (wd + nu) / ((nu * nu + w2) * (wd + nu) + nu * p.gamma * wd)
}

/// Coefficients bₖ with summand(ν) = Σ bₖ ν^{−k−2} for ν > max|λᵢ|.
fn laurent(p: &ModelParams) -> [f64; LAURENT_TERMS] {
    let wd = p.omega_d;
    let c1 = p.omega0 * p.omega0 + p.gamma * wd;
    let c0 = p.omega0 * p.omega0 * wd;
    let mut b = [0.0; LAURENT_TERMS];
    for k in 0..LAURENT_TERMS {
        let num = match k {
            0 => 1.0,
            1 => wd,
            _ => 0.0,
        };
        let mut v = num;
        if k >= 1 {
            v -= wd * b[k - 1];
        }
        if k >= 2 {
            v -= c1 * b[k - 2];
        }
        if k >= 3 {
            v -= c0 * b[k - 3];
        }
        b[k] = v;
    }
    b
}

/// ∫_{ν₀}^∞ summand(ν) dν from the Laurent series.
fn tail_integral(b: &[f64], nu0: f64) -> f64 {
    b.iter()
        .enumerate()
        .map(|(k, bk)| bk * nu0.powi(-(k as i32) - 1) / (k as f64 + 1.0))
        .sum()
}

/// j-th derivative in n of summand(h n) at ν₀ = h n₀.
fn tail_derivative(b: &[f64], nu0: f64, h: f64, j: u32) -> f64 {
    let mut acc = 0.0;
    for (k, bk) in b.iter().enumerate() {
        let p = k as f64 + 2.0;
        let mut rising = 1.0;
        for i in 0..j {
            rising *= p + i as f64;
        }
        acc += bk * rising * nu0.powf(-p - j as f64);
    }
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    sign * h.powi(j as i32) * acc
}

fn largest_rate(roots: &CubicRoots, p: &ModelParams) -> f64 {
    roots
        .as_array()
        .iter()
        .map(|l| l.norm())
        .fold(p.omega_d.max(p.omega0), f64::max)
}

fn smallest_rate(roots: &CubicRoots) -> f64 {
    roots.as_array().iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min)
}

/// Σ_{n≥1} summand(2πn/ħβ).
fn positive_sum(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    let h = 2.0 * PI / (HBAR * beta);
    let radius = TAIL_RADIUS * largest_rate(roots, p);
    let n0 = ((radius / h).ceil() as usize).max(MIN_EXPLICIT);
    if n0 > 50_000_000 {
        return Err(Error::NumericalFailure(format!("Matsubara series needs {n0} explicit terms at beta = {beta:e}")));
    }
    // small terms first
    let explicit: f64 = (1..n0).rev().map(|n| summand(h * n as f64, p)).sum();
    let b = laurent(p);
    let nu0 = h * n0 as f64;
    let tail = tail_integral(&b, nu0) / h + 0.5 * summand(nu0, p) - tail_derivative(&b, nu0, h, 1) / 12.0
        + tail_derivative(&b, nu0, h, 3) / 720.0
        - tail_derivative(&b, nu0, h, 5) / 30240.0;
    Ok(explicit + tail)
}

/// Matsubara sum Σ_{n∈ℤ} summand(|ν_n|); equals mβ⟨q²⟩.
pub fn matsubara_sum(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
    }
    Ok(1.0 / (p.omega0 * p.omega0) + 2.0 * positive_sum(beta, roots, p)?)
}

/// ⟨q²⟩ at inverse temperature β; β = ∞ gives the ground-state value.
pub fn q_squared_at(beta: f64, roots: &CubicRoots, p: &ModelParams) -> Result<f64> {
    if beta == f64::INFINITY {
        return Ok(HBAR / (PI * p.mass) * zero_temperature_integral(roots, p));
    }
    Ok(matsubara_sum(beta, roots, p)? / (p.mass * beta))
}

/// ∫₀^∞ summand(ν) dν: geometric Gauss–Legendre panels up to four times the
/// largest rate, Laurent tail beyond.
fn zero_temperature_integral(roots: &CubicRoots, p: &ModelParams) -> f64 {
    let (nodes, weights) = gauss_legendre();
    let radius = TAIL_RADIUS * largest_rate(roots, p);
    let mut lo = 0.0;
    let mut hi = 0.25 * smallest_rate(roots).min(p.omega0);
    let mut acc = 0.0;
    loop {
        let hi_c = hi.min(radius);
        let (mid, half) = (0.5 * (lo + hi_c), 0.5 * (hi_c - lo));
        acc += half * nodes.iter().zip(weights).map(|(x, w)| w * summand(mid + half * x, p)).sum::<f64>();
        if hi_c >= radius {
            break;
        }
        lo = hi_c;
        hi = 2.0 * hi_c;
    }
    acc + tail_integral(&laurent(p), radius)
}

fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = [0.0; GL_ORDER];
        let mut w = [0.0; GL_ORDER];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    // refresh the derivative at the converged node
                    let (mut q0, mut q1) = (1.0, z);
                    for k in 2..=n {
                        let k = k as f64;
                        let q2 = ((2.0 * k - 1.0) * z * q1 - (k - 1.0) * q0) / k;
                        q0 = q1;
                        q1 = q2;
                    }
                    let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                    w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                    break;
                }
            }
            x[i] = z;
        }
        (x, w)
    })
}
