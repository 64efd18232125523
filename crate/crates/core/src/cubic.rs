//! Roots of the Drude characteristic cubic
//! λ³ − ω_D λ² + (ω₀² + γω_D) λ − ω₀²ω_D = 0.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::specfun::ComplexVal;

/// Root structure of the cubic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    AllReal,
    RealAndConjugatePair,
}

/// The three rates λ₁, λ₂, λ₃ ordered by descending real part, then
/// descending imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub lambda1: ComplexVal,
    pub lambda2: ComplexVal,
    pub lambda3: ComplexVal,
    pub kind: RootKind,
    coeffs: [f64; 3],
}

impl CubicRoots {
    pub fn as_array(&self) -> [ComplexVal; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }

    /// Monic coefficients `[a2, a1, a0]` of λ³ + a2λ² + a1λ + a0.
    pub fn coefficients(&self) -> [f64; 3] {
        self.coeffs
    }

    pub fn eval(&self, z: ComplexVal) -> ComplexVal {
        horner(&self.coeffs, z)
    }

    /// Relative residuals of the three Vieta identities
    /// (sum, pairwise sum, product).
    pub fn vieta_residuals(&self) -> [f64; 3] {
        let [a2, a1, a0] = self.coeffs;
        let [l1, l2, l3] = self.as_array();
        let s1 = l1 + l2 + l3;
        let s2 = l1 * l2 + l1 * l3 + l2 * l3;
        let s3 = l1 * l2 * l3;
        [
            (s1 + a2).norm() / a2.abs().max(f64::MIN_POSITIVE),
            (s2 - a1).norm() / a1.abs().max(f64::MIN_POSITIVE),
            (s3 + a0).norm() / a0.abs().max(f64::MIN_POSITIVE),
        ]
    }
}

fn horner(c: &[f64; 3], z: ComplexVal) -> ComplexVal {
    ((z + c[0]) * z + c[1]) * z + c[2]
}

fn horner_deriv(c: &[f64; 3], z: ComplexVal) -> ComplexVal {
    (3.0 * z + 2.0 * c[0]) * z + c[1]
}

/// One Newton step, kept only if it lowers |p|.
fn polish(c: &[f64; 3], z: ComplexVal) -> ComplexVal {
    let d = horner_deriv(c, z);
    if d.norm() == 0.0 {
        return z;
    }
    let p = horner(c, z);
    let next = z - p / d;
    if horner(c, next).norm() < p.norm() {
        next
    } else {
        z
    }
}

fn order(mut r: [ComplexVal; 3]) -> [ComplexVal; 3] {
    r.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    r
}

/// Solves the Drude cubic through the 3×3 companion-matrix eigenproblem,
/// then deflates on the real root and polishes each root with Newton.
pub fn solve_drude_cubic(omega0: f64, omega_d: f64, gamma: f64) -> Result<CubicRoots> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::InvalidParams(format!("omega0 must be > 0, got {omega0}")));
    }
    if !(omega_d > 0.0 && omega_d.is_finite()) {
        return Err(Error::InvalidParams(format!("omegaD must be > 0, got {omega_d}")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!("gamma must be >= 0, got {gamma}")));
    }
    let a2 = -omega_d;
    let a1 = omega0 * omega0 + gamma * omega_d;
    let a0 = -omega0 * omega0 * omega_d;
    let coeffs = [a2, a1, a0];

    let companion = Matrix3::new(-a2, -a1, -a0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let eig = companion.complex_eigenvalues();
    let real_idx = (0..3)
        .min_by(|&i, &j| eig[i].im.abs().partial_cmp(&eig[j].im.abs()).unwrap())
        .ok_or_else(|| Error::NumericalFailure("empty eigenvalue set".into()))?;
    let r = polish(&coeffs, ComplexVal::new(eig[real_idx].re, 0.0)).re;
    if !r.is_finite() || r == 0.0 {
        return Err(Error::NumericalFailure(format!("degenerate real root {r}")));
    }

    // λ² + bλ + c with c from the product identity
    let b = a2 + r;
    let c = -a0 / r;
    let disc = b * b - 4.0 * c;
    let scale = omega_d.max(omega0).max(gamma);
    let (q1, q2, kind) = if disc < 0.0 {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        let re = if re < 0.0 && re > -1e-12 * scale { 0.0 } else { re };
        let z = polish(&coeffs, ComplexVal::new(re, im));
        let z = ComplexVal::new(z.re, z.im.abs());
        (z, z.conj(), RootKind::RealAndConjugatePair)
    } else {
        let s = disc.sqrt();
        let big = -0.5 * (b + s.copysign(b));
        let small = if big != 0.0 { c / big } else { 0.0 };
        (
            polish(&coeffs, ComplexVal::new(big, 0.0)),
            polish(&coeffs, ComplexVal::new(small, 0.0)),
            RootKind::AllReal,
        )
    };
    let roots = order([ComplexVal::new(r, 0.0), q1, q2]);
    Ok(CubicRoots {
        lambda1: roots[0],
        lambda2: roots[1],
        lambda3: roots[2],
        kind,
        coeffs,
    })
}
