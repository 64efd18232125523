//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::Command;
use std::time::{Duration, Instant};

use microtemp::oracle::{discretize_bath, exact_dos_power_law, finite_n_beta, normal_modes, BathScheme};
use microtemp::qbm::{epsilon0, interaction_energy, log_ztilde_renormalized, EnergyValue, ModelParams};
use microtemp::spa::{solve_saddle, spa_dos, CompositeSystem, LogZ, SearchOptions};
use microtemp::specfun::ZETA4;
use microtemp::thermo::{
    beta_of_e, entropy_global, first_order_beta, grid, q_squared_at, sweep, thermo_point, SweepSpec, SweepVar,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn fig(gamma: f64) -> ModelParams {
    ModelParams::from_ratios(5.0, 10.0, gamma).unwrap()
}

fn check(ok: bool, msg: impl Into<String>) -> Outcome {
    if ok {
        Ok(msg.into())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: f64, out: Outcome) -> Outcome {
    let secs = elapsed.as_secs_f64();
    match out {
        Ok(m) if secs < limit => Ok(format!("{m}; {secs:.2}s < {limit}s")),
        Ok(m) => Err(format!("{m}; too slow: {secs:.2}s >= {limit}s")),
        Err(m) => Err(format!("{m}; {secs:.2}s")),
    }
}

fn timed(limit: Option<f64>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let out = f();
    match limit {
        Some(l) => within(t.elapsed(), l, out),
        None => out,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn decoupled_closed_form() -> Outcome {
    let p = fig(0.0);
    let mut worst = 0.0_f64;
    for e in grid(1e-3, 1e3, 20, true).unwrap() {
        let ei = EnergyValue::scaled(e).to_internal(&p);
        let want = (6.0 * p.kappa * ZETA4 / ei).powf(0.25);
        let got = beta_of_e(EnergyValue::scaled(e), &p).map_err(|x| x.to_string())?.beta_star;
        worst = worst.max(rel(got, want));
    }
    check(worst <= 1e-8, format!("max rel error {worst:.2e} (tol 1e-8)"))
}

fn decoupled_rhs() -> Outcome {
    let p = fig(0.0);
    let r = p.roots().unwrap();
    let mut worst = 0.0_f64;
    for beta in grid(0.01, 100.0, 200, true).unwrap() {
        worst = worst.max(interaction_energy(beta, &r, &p).map_err(|x| x.to_string())?.abs());
    }
    check(worst <= 1e-10, format!("max |RHS| {worst:.2e} (tol 1e-10)"))
}

fn entropy_slope() -> Outcome {
    let mut worst = 0.0_f64;
    for gamma in grid(0.0, 5.0, 10, false).unwrap() {
        let p = fig(gamma);
        for ep in grid(0.1, 100.0, 10, true).unwrap() {
            let e = EnergyValue::scaled(ep).to_internal(&p);
            let h = 1e-4 * e;
            let s = |x: f64| beta_of_e(EnergyValue::internal(x), &p).map(|sol| entropy_global(&sol));
            let slope = (s(e + h).map_err(|x| x.to_string())? - s(e - h).map_err(|x| x.to_string())?) / (2.0 * h);
            let beta = beta_of_e(EnergyValue::internal(e), &p).map_err(|x| x.to_string())?.beta_star;
            worst = worst.max(rel(slope, beta));
        }
    }
    check(worst <= 1e-6, format!("max rel |dS/dE - beta| {worst:.2e} on 10x10 grid (tol 1e-6)"))
}

fn third_law() -> Outcome {
    for gamma in [0.0, 0.5, 1.0, 2.0] {
        let s = thermo_point(EnergyValue::scaled(0.0), &fig(gamma)).map_err(|x| x.to_string())?.s_a_over_k;
        if s.abs() > 1e-9 {
            return Err(format!("S_A(E=0) = {s:e} at gamma {gamma}"));
        }
    }
    let gammas = [0.0, 0.5, 1.0, 2.0, 5.0];
    let energies = grid(0.01, 100.0, 13, true).unwrap();
    let mut table = Vec::new();
    for &g in &gammas {
        let mut row = Vec::new();
        for &e in &energies {
            row.push(thermo_point(EnergyValue::scaled(e), &fig(g)).map_err(|x| x.to_string())?.s_a_over_k);
        }
        table.push(row);
    }
    let positive = table.iter().flatten().all(|&s| s > 0.0);
    let up_e = table.iter().all(|r| r.windows(2).all(|w| w[1] > w[0]));
    let up_g = (0..energies.len()).all(|j| table.windows(2).all(|w| w[1][j] > w[0][j]));
    check(
        positive && up_e && up_g,
        format!("S_A(0)=0 for 4 gammas; positive {positive}, increasing in E {up_e}, in gamma {up_g} (5x13 grid)"),
    )
}

fn column(spec: SweepSpec, f: impl Fn(&microtemp::thermo::ThermoPoint) -> f64) -> Result<Vec<f64>, String> {
    sweep(&spec)
        .map_err(|x| x.to_string())?
        .into_iter()
        .map(|r| r.point.map(|pt| f(&pt)).map_err(|x| x.to_string()))
        .collect()
}

fn spec(vary: SweepVar, min: f64, max: f64, log_scale: bool, gamma: f64, e: f64) -> SweepSpec {
    SweepSpec { vary, min, max, steps: 51, log_scale, params: fig(gamma), energy: EnergyValue::scaled(e) }
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn figure_trends() -> Outcome {
    let mut fails = Vec::new();
    for e in [0.2, 10.0] {
        if !increasing(&column(spec(SweepVar::Gamma, 0.0, 5.0, false, 0.0, e), |p| p.beta)?) {
            fails.push(format!("beta not increasing in gamma at E={e}"));
        }
    }
    for g in [0.0, 1.0, 5.0] {
        if !decreasing(&column(spec(SweepVar::Energy, 0.01, 100.0, true, g, 0.0), |p| p.beta)?) {
            fails.push(format!("beta not decreasing in E at gamma={g}"));
        }
        if !increasing(&column(spec(SweepVar::Energy, 0.01, 100.0, true, g, 0.0), |p| p.q2)?) {
            fails.push(format!("q2 not increasing in E at gamma={g}"));
        }
    }
    for e in [0.2, 1.0, 10.0] {
        if !decreasing(&column(spec(SweepVar::Gamma, 0.0, 5.0, false, 0.0, e), |p| p.q2)?) {
            fails.push(format!("q2 not decreasing in gamma at E={e}"));
        }
    }
    if fails.is_empty() {
        Ok("dbeta/dgamma > 0 at E=0.2 and 10; beta down and q2 up in E; q2 down in gamma".into())
    } else {
        Err(fails.join("; "))
    }
}

fn q2_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let beta = 10f64.powf(rng.gen_range(-1.0..2.0));
        let p = fig(rng.gen_range(0.05..10.0));
        let w2 = p.omega0 * p.omega0;
        let h = 1e-4 * w2;
        let at = |v: f64| -> Result<f64, String> {
            // the zero-point shift depends on ω₀ and belongs in the derivative
            let q = ModelParams { omega0: v.sqrt(), ..p };
            let r = q.roots().map_err(|x| x.to_string())?;
            let ren = log_ztilde_renormalized(beta, &r, &q).map_err(|x| x.to_string())?;
            Ok(ren - beta * epsilon0(&r, &q).map_err(|x| x.to_string())?)
        };
        let fd = -(2.0 / (p.mass * beta)) * (at(w2 + h)? - at(w2 - h)?) / (2.0 * h);
        let series = q_squared_at(beta, &p).map_err(|x| x.to_string())?;
        worst = worst.max(rel(series, fd));
    }
    let p = fig(0.0);
    let mut worst0 = 0.0_f64;
    for beta in grid(0.01, 100.0, 25, true).unwrap() {
        let want = 1.0 / (2.0 * p.mass * p.omega0 * (0.5 * beta * p.omega0).tanh());
        worst0 = worst0.max(rel(q_squared_at(beta, &p).map_err(|x| x.to_string())?, want));
    }
    check(
        worst <= 1e-6 && worst0 <= 1e-10,
        format!("FD oracle max rel {worst:.2e} (tol 1e-6); coth limit {worst0:.2e} (tol 1e-10)"),
    )
}

fn spa_gap() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for a in [15.0, 150.0, 1500.0] {
        let sys = CompositeSystem::new().with_term("power law", move |b: f64| Ok(LogZ::new(-a * b.ln(), -a / b, a / (b * b))));
        let e = 0.5 * a;
        let sol = solve_saddle(&sys, e, &SearchOptions::default()).map_err(|x| x.to_string())?;
        let gap = (spa_dos(&sys, &sol).map_err(|x| x.to_string())? - exact_dos_power_law(a, e).map_err(|x| x.to_string())?).abs();
        let ratio = gap * 12.0 * a;
        ok &= (0.5..=2.0).contains(&ratio);
        parts.push(format!("a={a}: gap*12a={ratio:.4}"));
    }
    check(ok, parts.join(", "))
}

fn finite_n() -> Outcome {
    let p = fig(1.0);
    let e = EnergyValue::scaled(10.0);
    let cont = beta_of_e(e, &p).map_err(|x| x.to_string())?.beta_star;
    let mut errs = Vec::new();
    for n in [64, 256, 1024] {
        let bath = discretize_bath(&p, n, BathScheme::DrudeLorentzian).map_err(|x| x.to_string())?;
        let modes = normal_modes(&bath, &p).map_err(|x| x.to_string())?;
        let b = finite_n_beta(&modes, &bath, e, &p).map_err(|x| x.to_string())?.beta_star;
        errs.push(rel(b, cont));
    }
    let msg = format!("rel errors {:.2e}, {:.2e}, {:.2e} at N=64, 256, 1024", errs[0], errs[1], errs[2]);
    check(errs[2] <= 0.02 && decreasing(&errs), msg)
}

fn first_order() -> Outcome {
    let e = EnergyValue::scaled(0.2);
    let full = |g: f64| beta_of_e(e, &fig(g)).map(|s| s.beta_star).map_err(|x| x.to_string());
    let first = |g: f64| first_order_beta(e, &fig(g)).map_err(|x| x.to_string());
    let mut worst = 0.0_f64;
    for g in [0.001, 0.0025, 0.005, 0.01] {
        worst = worst.max(rel(first(g)?, full(g)?));
    }
    let slope_full = (full(5.0)? - full(4.9)?) / 0.1;
    let slope_first = (first(5.0)? - first(4.9)?) / 0.1;
    check(
        worst <= 1e-3 && slope_full < slope_first,
        format!("small-gamma rel {worst:.2e} (tol 1e-3); slopes at gamma=5: full {slope_full:.4} < first order {slope_first:.4}"),
    )
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_microtemp");
    let commands = ["beta", "fig1", "fig2", "fig3", "fig4", "fig5", "sweep", "oracle-compare"];
    let mut bytes = 0;
    for c in commands {
        let runs: Vec<_> = (0..2).map(|_| Command::new(exe).arg(c).output().expect("run binary")).collect();
        for r in &runs {
            if !r.status.success() {
                return Err(format!("{c} exited with {:?}", r.status.code()));
            }
        }
        if runs[0].stdout != runs[1].stdout || runs[0].stdout.is_empty() {
            return Err(format!("{c}: outputs differ"));
        }
        bytes += runs[0].stdout.len();
    }
    Ok(format!("{} commands identical across two runs ({bytes} bytes)", commands.len()))
}

fn main() {
    let criteria: [(&str, Option<f64>, fn() -> Outcome); 10] = [
        ("decoupled closed form", Some(1.0), decoupled_closed_form),
        ("decoupled RHS vanishes", None, decoupled_rhs),
        ("dS/dE = beta", Some(10.0), entropy_slope),
        ("third law and S_A monotonicity", None, third_law),
        ("figure trends", Some(30.0), figure_trends),
        ("q2 oracle equivalence", None, q2_oracle),
        ("SPA vs exact DOS", Some(1.0), spa_gap),
        ("finite-N convergence", Some(60.0), finite_n),
        ("first-order contrast", None, first_order),
        ("CLI determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        match timed(limit, f) {
            Ok(m) => println!("PASS {:>2} {name}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
