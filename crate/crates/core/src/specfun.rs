//! Complex log-Gamma, digamma and a few elementary kernels.
//!
//! Both Gamma-family functions shift the argument upward with the
//! recurrence until the Stirling series converges to double precision, then
//! sum the series. Arguments used by the model sit in the closed right half
//! plane (1 + ħβλ/2π with Re λ ≥ 0), where this is uniformly accurate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for Gamma-function arguments and cubic roots.
pub type ComplexVal = Complex64;

/// ζ(4) = π⁴/90.
pub const ZETA4: f64 = PI * PI * PI * PI / 90.0;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} for k = 1..9.
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

// Below these the argument is shifted upward before the asymptotic series.
const SHIFT_TARGET_RE: f64 = 15.0;
const DIRECT_MODULUS: f64 = 30.0;

pub fn zeta4() -> f64 {
    ZETA4
}

fn check_arg(z: ComplexVal) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::Pole(z.re));
    }
    Ok(())
}

fn finite(w: ComplexVal) -> Result<ComplexVal> {
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(Error::NumericalFailure(format!("non-finite result {w}")))
    }
}

/// Number of unit shifts that bring `z` into the asymptotic region.
fn shift_count(z: ComplexVal) -> usize {
    if z.re >= 0.0 && z.norm() >= DIRECT_MODULUS {
        0
    } else {
        (SHIFT_TARGET_RE - z.re).ceil().max(0.0) as usize
    }
}

/// Σ B_{2k} / (2k(2k−1) z^{2k−1}).
fn stirling_tail(z: ComplexVal) -> ComplexVal {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut acc = ComplexVal::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        acc += pow * (b / (n * (n - 1.0)));
        pow *= inv2;
    }
    acc
}

/// Σ B_{2k} / (2k z^{2k}).
fn digamma_tail(z: ComplexVal) -> ComplexVal {
    let inv2 = (z * z).inv();
    let mut pow = inv2;
    let mut acc = ComplexVal::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        acc += pow * (b / n);
        pow *= inv2;
    }
    acc
}

fn stirling_main(z: ComplexVal) -> ComplexVal {
    (z - 0.5) * z.ln() - z + HALF_LN_2PI
}

/// Principal-branch log Γ(z).
pub fn log_gamma(z: ComplexVal) -> Result<ComplexVal> {
    check_arg(z)?;
    let n = shift_count(z);
    let mut w = z;
    let mut logs = ComplexVal::new(0.0, 0.0);
    for _ in 0..n {
        logs += w.ln();
        w += 1.0;
    }
    finite(stirling_main(w) + stirling_tail(w) - logs)
}

/// ψ(z) = d/dz log Γ(z).
pub fn digamma(z: ComplexVal) -> Result<ComplexVal> {
    check_arg(z)?;
    let n = shift_count(z);
    let mut w = z;
    let mut recip = ComplexVal::new(0.0, 0.0);
    for _ in 0..n {
        recip += w.inv();
        w += 1.0;
    }
    finite(w.ln() - 0.5 * w.inv() - digamma_tail(w) - recip)
}

/// Stirling remainder R(z) = log Γ(z) − [(z − ½) log z − z + ½ log 2π].
///
/// Decays like 1/(12z) for large |z|, so sums of remainders stay accurate
/// where the raw log Γ values would cancel catastrophically.
pub fn stirling_remainder(z: ComplexVal) -> Result<ComplexVal> {
    check_arg(z)?;
    if shift_count(z) == 0 {
        return finite(stirling_tail(z));
    }
    Ok(log_gamma(z)? - stirling_main(z))
}

/// R'(z) = ψ(z) − log z + 1/(2z).
pub fn stirling_remainder_deriv(z: ComplexVal) -> Result<ComplexVal> {
    check_arg(z)?;
    if shift_count(z) == 0 {
        return finite(-digamma_tail(z));
    }
    Ok(digamma(z)? - z.ln() + 0.5 * z.inv())
}

/// ψ'(z), the trigamma function.
pub fn trigamma(z: ComplexVal) -> Result<ComplexVal> {
    check_arg(z)?;
    let n = shift_count(z);
    let mut w = z;
    let mut acc = ComplexVal::new(0.0, 0.0);
    for _ in 0..n {
        acc += (w * w).inv();
        w += 1.0;
    }
    finite(acc + trigamma_asymptotic(w))
}

/// 1/z + 1/(2z²) + Σ B_{2k} / z^{2k+1}.
fn trigamma_asymptotic(z: ComplexVal) -> ComplexVal {
    let inv = z.inv();
    inv + 0.5 * inv * inv + trigamma_tail(z)
}

fn trigamma_tail(z: ComplexVal) -> ComplexVal {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv2 * inv;
    let mut acc = ComplexVal::new(0.0, 0.0);
    for b in BERNOULLI {
        acc += pow * b;
        pow *= inv2;
    }
    acc
}

/// R''(z) = ψ'(z) − 1/z − 1/(2z²).
pub fn stirling_remainder_deriv2(z: ComplexVal) -> Result<ComplexVal> {
    check_arg(z)?;
    if shift_count(z) == 0 {
        return finite(trigamma_tail(z));
    }
    let inv = z.inv();
    Ok(trigamma(z)? - inv - 0.5 * inv * inv)
}

/// coth(x) without overflow for large |x| and without cancellation near 0.
pub fn coth_stable(x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("coth undefined at {x}")));
    }
    let ax = x.abs();
    let v = if ax < 1e-3 {
        let x2 = ax * ax;
        1.0 / ax + ax * (1.0 / 3.0 - x2 * (1.0 / 45.0 - x2 * 2.0 / 945.0))
    } else if ax > 20.0 {
        // 1 + 2e^{-2x} + O(e^{-4x})
        1.0 + 2.0 * (-2.0 * ax).exp()
    } else {
        1.0 / ax.tanh()
    };
    Ok(v.copysign(x))
}

/// log(1 − e^{−x}) for x > 0.
pub fn log1mexp(x: f64) -> f64 {
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// Bose occupation 1/(e^x − 1), zero for x = +∞.
pub fn bose(x: f64) -> f64 {
    if x > 700.0 {
        (-x).exp()
    } else {
        1.0 / x.exp_m1()
    }
}
