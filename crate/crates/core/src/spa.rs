//! Saddle-point engine for densities of states.
//!
//! A composite system is a product of partition functions, so its log Z is
//! a sum of terms. The microcanonical saddle sits on the positive real β
//! axis where E + Σ d/dβ log Zᵢ(β) = 0.

use std::fmt;

use crate::error::{Error, Result};

/// log Z and its first two β-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogZ {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl LogZ {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }
}

impl From<[f64; 3]> for LogZ {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

type LogZFn = Box<dyn Fn(f64) -> Result<LogZ> + Send + Sync>;

/// One named factor of the composite partition function.
pub struct LogZTerm {
    pub name: String,
    eval: LogZFn,
}

impl LogZTerm {
    pub fn eval(&self, beta: f64) -> Result<LogZ> {
        let v = (self.eval)(beta)?;
        if v.value.is_finite() && v.d1.is_finite() && v.d2.is_finite() {
            Ok(v)
        } else {
            Err(Error::NumericalFailure(format!("term '{}' not finite at beta = {beta:e}", self.name)))
        }
    }
}

impl fmt::Debug for LogZTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogZTerm").field("name", &self.name).finish_non_exhaustive()
    }
}

/// Weakly or strongly coupled subsystems whose partition functions multiply.
#[derive(Debug, Default)]
pub struct CompositeSystem {
    terms: Vec<LogZTerm>,
    particle_fractions: Vec<f64>,
    energy_per_particle: Option<f64>,
}

impl CompositeSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term<F>(mut self, name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Result<LogZ> + Send + Sync + 'static,
    {
        self.terms.push(LogZTerm { name: name.into(), eval: Box::new(f) });
        self
    }

    /// Particle fractions ν_A, ν_B, …; they must be nonnegative and sum to one.
    pub fn with_fractions(mut self, fractions: Vec<f64>, energy_per_particle: Option<f64>) -> Result<Self> {
        let sum: f64 = fractions.iter().sum();
        if fractions.iter().any(|&v| !(v >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("particle fractions {fractions:?} must be >= 0 and sum to 1")));
        }
        self.particle_fractions = fractions;
        self.energy_per_particle = energy_per_particle;
        Ok(self)
    }

    pub fn terms(&self) -> &[LogZTerm] {
        &self.terms
    }

    pub fn particle_fractions(&self) -> &[f64] {
        &self.particle_fractions
    }

    pub fn energy_per_particle(&self) -> Option<f64> {
        self.energy_per_particle
    }

    /// Σ log Zᵢ with summed derivatives.
    pub fn log_z(&self, beta: f64) -> Result<LogZ> {
        let mut acc = LogZ::new(0.0, 0.0, 0.0);
        for t in &self.terms {
            let v = t.eval(beta)?;
            acc.value += v.value;
            acc.d1 += v.d1;
            acc.d2 += v.d2;
        }
        Ok(acc)
    }

    /// Saddle residual E + Σ d/dβ log Zᵢ(β).
    pub fn residual(&self, energy: f64, beta: f64) -> Result<f64> {
        Ok(energy + self.log_z(beta)?.d1)
    }

    /// Mean energy of each subsystem, Ēᵢ = −d/dβ log Zᵢ, at β.
    pub fn energy_split(&self, beta: f64) -> Result<Vec<(String, f64)>> {
        self.terms.iter().map(|t| Ok((t.name.clone(), -t.eval(beta)?.d1))).collect()
    }
}

/// A solved equilibrium point τ* = −iβ*.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSolution {
    pub beta_star: f64,
    pub energy: f64,
    pub residual: f64,
    /// d²φ/dτ² at the saddle, −∂²log Z/∂β².
    pub phi_second: f64,
    /// β*E + Σ log Zᵢ(β*).
    pub entropy_over_k: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

impl SaddleSolution {
    /// The E = 0 ground-state limit, β = ∞.
    pub fn ground_state() -> Self {
        Self {
            beta_star: f64::INFINITY,
            energy: 0.0,
            residual: 0.0,
            phi_second: 0.0,
            entropy_over_k: 0.0,
            bracket: (f64::INFINITY, f64::INFINITY),
            iterations: 0,
        }
    }

    pub fn is_ground_state(&self) -> bool {
        self.beta_star.is_infinite()
    }

    /// Helmholtz free energy F = E − S/(Kβ).
    pub fn free_energy(&self) -> f64 {
        if self.is_ground_state() {
            self.energy
        } else {
            self.energy - self.entropy_over_k / self.beta_star
        }
    }
}

/// Bracket and tolerances for [`solve_saddle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_iterations: usize,
    /// Each expansion widens the failing side of the bracket by 100×.
    pub max_expansions: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            beta_lo: 1e-6,
            beta_hi: 1e6,
            tol_rel: 1e-10,
            tol_abs: 1e-12,
            max_iterations: 200,
            max_expansions: 20,
        }
    }
}

/// Finds β* with E + Σ d/dβ log Zᵢ(β*) = 0 by Brent's method on a
/// sign-changing bracket, widening the bracket geometrically if needed.
pub fn solve_saddle(system: &CompositeSystem, energy: f64, opts: &SearchOptions) -> Result<SaddleSolution> {
    if !energy.is_finite() {
        return Err(Error::Domain(format!("energy must be finite, got {energy}")));
    }
    let tol = opts.tol_abs + opts.tol_rel * energy.abs();
    let root = find_increasing_root(|b| system.residual(energy, b), tol, opts)?;
    let beta = root.beta;
    let lz = system.log_z(beta)?;
    if !(lz.d2 != 0.0) {
        return Err(Error::SpaInvalid(format!("d2 log Z vanishes at beta = {beta:e}")));
    }
    Ok(SaddleSolution {
        beta_star: beta,
        energy,
        residual: root.residual,
        phi_second: -lz.d2,
        entropy_over_k: beta * energy + lz.value,
        bracket: root.bracket,
        iterations: root.iterations,
    })
}

/// Root of a residual that rises through zero as β grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaRoot {
    pub beta: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Brent's method on `f` over the bracket of `opts`, widened 100× on the
/// failing side until the sign changes. Converged when |f| ≤ `tol`.
pub fn find_increasing_root<F>(f: F, tol: f64, opts: &SearchOptions) -> Result<BetaRoot>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(opts.beta_lo > 0.0 && opts.beta_hi > opts.beta_lo) {
        return Err(Error::Domain(format!("bad bracket [{}, {}]", opts.beta_lo, opts.beta_hi)));
    }
    let (mut lo, mut hi) = (opts.beta_lo, opts.beta_hi);
    let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
    let mut expansions = 0;
    while flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        if expansions == opts.max_expansions {
            return Err(Error::NoBracket { lo, hi });
        }
        expansions += 1;
        if flo > 0.0 {
            hi = lo;
            fhi = flo;
            lo /= 100.0;
            flo = f(lo)?;
        } else {
            lo = hi;
            flo = fhi;
            hi *= 100.0;
            fhi = f(hi)?;
        }
    }
    let (beta, residual, iterations) = brent(f, lo, hi, flo, fhi, tol, opts.max_iterations)?;
    Ok(BetaRoot { beta, residual, bracket: (lo, hi), iterations })
}

/// Brent's method. Returns (root, residual, iterations).
fn brent<F>(f: F, lo: f64, hi: f64, flo: f64, fhi: f64, tol: f64, max_iter: usize) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, flo, fhi);
    if fa == 0.0 {
        return Ok((a, 0.0, 0));
    }
    if fb == 0.0 {
        return Ok((b, 0.0, 0));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    for it in 1..=max_iter {
        if fb.abs() <= tol {
            return Ok((b, fb, it - 1));
        }
        let xtol = 2.0 * f64::EPSILON * b.abs();
        if (b - a).abs() <= xtol {
            // bracket at machine resolution; keep the better end
            return Ok(if fa.abs() < fb.abs() { (a, fa, it - 1) } else { (b, fb, it - 1) });
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let q = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > q.min(b)) && (s < q.max(b)));
        let slow = if bisected { (s - b).abs() >= (b - c).abs() / 2.0 } else { (s - b).abs() >= (c - d).abs() / 2.0 };
        let tiny = if bisected { (b - c).abs() < xtol } else { (c - d).abs() < xtol };
        if out_of_range || slow || tiny || !s.is_finite() {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::MaxIterations { iterations: max_iter, last: b })
}

/// Picks the saddle of largest entropy; ties go to the smaller β*.
pub fn select_max_entropy(candidates: &[SaddleSolution]) -> Result<SaddleSolution> {
    candidates
        .iter()
        .copied()
        .reduce(|best, c| {
            if c.entropy_over_k > best.entropy_over_k
                || (c.entropy_over_k == best.entropy_over_k && c.beta_star < best.beta_star)
            {
                c
            } else {
                best
            }
        })
        .ok_or(Error::EmptyInput)
}

/// Gaussian-prefactor estimate of log G(E):
/// β*E + Σ log Zᵢ(β*) − ½ log(2π ∂²log Z/∂β²).
pub fn spa_dos(system: &CompositeSystem, solution: &SaddleSolution) -> Result<f64> {
    let lz = system.log_z(solution.beta_star)?;
    if !(lz.d2 > 0.0) {
        return Err(Error::SpaInvalid(format!("curvature {} <= 0 at beta = {:e}", lz.d2, solution.beta_star)));
    }
    let s = solution.beta_star * solution.energy + lz.value;
    Ok(s - 0.5 * (2.0 * std::f64::consts::PI * lz.d2).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_law(a: f64) -> CompositeSystem {
        CompositeSystem::new().with_term("gas", move |b: f64| Ok(LogZ::new(-a * b.ln(), -a / b, a / (b * b))))
    }

    #[test]
    fn power_law_saddle() {
        let sol = solve_saddle(&power_law(150.0), 75.0, &SearchOptions::default()).unwrap();
        assert!((sol.beta_star - 2.0).abs() < 1e-10);
        assert!(sol.residual.abs() <= 1e-12 + 1e-10 * 75.0);
        assert!(sol.bracket.0 <= sol.beta_star && sol.beta_star <= sol.bracket.1);
        assert!(sol.phi_second < 0.0);
    }

    #[test]
    fn two_terms_split_energy() {
        let (a1, a2, e) = (30.0, 90.0, 40.0);
        let sys = CompositeSystem::new()
            .with_term("A", move |b: f64| Ok(LogZ::new(-a1 * b.ln(), -a1 / b, a1 / (b * b))))
            .with_term("B", move |b: f64| Ok(LogZ::new(-a2 * b.ln(), -a2 / b, a2 / (b * b))));
        let sol = solve_saddle(&sys, e, &SearchOptions::default()).unwrap();
        assert!((sol.beta_star - (a1 + a2) / e).abs() < 1e-10);
        let split = sys.energy_split(sol.beta_star).unwrap();
        assert!((split[0].1 - a1 / sol.beta_star).abs() < 1e-9);
        assert!((split[1].1 - a2 / sol.beta_star).abs() < 1e-9);
        assert!((split[0].1 + split[1].1 - e).abs() < 1e-8);
    }

    #[test]
    fn bracket_expands_both_ways() {
        let opts = SearchOptions { beta_lo: 1.0, beta_hi: 2.0, ..Default::default() };
        let sys = power_law(3.0);
        let low = solve_saddle(&sys, 3e4, &opts).unwrap();
        assert!((low.beta_star - 1e-4).abs() < 1e-13);
        let high = solve_saddle(&sys, 3e-4, &opts).unwrap();
        assert!((high.beta_star - 1e4).abs() < 1e-5);
    }

    #[test]
    fn no_bracket_reported() {
        let opts = SearchOptions { max_expansions: 3, ..Default::default() };
        let err = solve_saddle(&power_law(3.0), 0.0, &opts).unwrap_err();
        assert!(matches!(err, Error::NoBracket { .. }));
    }

    #[test]
    fn select_by_entropy() {
        let mut a = SaddleSolution::ground_state();
        a.beta_star = 1.0;
        a.entropy_over_k = 10.0;
        let mut b = a;
        b.beta_star = 0.5;
        b.entropy_over_k = 7.0;
        assert_eq!(select_max_entropy(&[a]).unwrap(), a);
        assert_eq!(select_max_entropy(&[b, a]).unwrap(), a);
        let mut tie = a;
        tie.beta_star = 0.3;
        assert_eq!(select_max_entropy(&[a, tie]).unwrap().beta_star, 0.3);
        assert_eq!(select_max_entropy(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn spa_dos_needs_positive_curvature() {
        let sys = CompositeSystem::new().with_term("bad", |b: f64| Ok(LogZ::new(b * b, 2.0 * b, 2.0)));
        let mut sol = SaddleSolution::ground_state();
        sol.beta_star = 1.0;
        assert!(spa_dos(&sys, &sol).is_ok());
        let sys = CompositeSystem::new().with_term("bad", |b: f64| Ok(LogZ::new(-b * b, -2.0 * b, -2.0)));
        assert!(matches!(spa_dos(&sys, &sol), Err(Error::SpaInvalid(_))));
    }

    #[test]
    fn free_energy_identity() {
        let sol = solve_saddle(&power_law(150.0), 75.0, &SearchOptions::default()).unwrap();
        let log_z = -150.0 * sol.beta_star.ln();
        let f_direct = -log_z / sol.beta_star;
        assert!((sol.free_energy() - f_direct).abs() < 1e-12 * f_direct.abs());
    }

    #[test]
    fn fractions_validated() {
        assert!(power_law(1.0).with_fractions(vec![0.25, 0.75], Some(2.0)).is_ok());
        assert!(power_law(1.0).with_fractions(vec![0.5, 0.6], None).is_err());
        assert!(power_law(1.0).with_fractions(vec![-0.5, 1.5], None).is_err());
    }
}
