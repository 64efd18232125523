//! The subcommands, each producing one table.

use microtemp::oracle::{discretize_bath, finite_n_beta, normal_modes, BathScheme};
use microtemp::qbm::{EnergyValue, ModelParams};
use microtemp::thermo::{beta_of_e, first_order_beta, grid, q_squared_at, sweep, SweepSpec, SweepVar, ThermoPoint};
use microtemp::Error;

use crate::config::{RunConfig, SweepConfig};
use crate::table::{fmt_num, Table};
use crate::CliError;

/// Short status tag for a failed point.
pub fn status(e: &Error) -> &'static str {
    match e {
        Error::Pole(_) => "pole",
        Error::Domain(_) => "domain",
        Error::InvalidParams(_) => "invalid_params",
        Error::NoBracket { .. } => "no_bracket",
        Error::MaxIterations { .. } => "max_iterations",
        Error::SpaInvalid(_) => "spa_invalid",
        Error::EmptyInput => "empty_input",
        Error::NumericalFailure(_) => "numerical_failure",
    }
}

fn solver(e: Error) -> CliError {
    CliError::Solver(e.to_string())
}

fn gamma_grid(min: f64, max: f64) -> SweepConfig {
    SweepConfig { vary: SweepVar::Gamma, min, max, steps: 51, log_scale: false }
}

fn values(s: &SweepConfig) -> Result<Vec<f64>, CliError> {
    grid(s.min, s.max, s.steps, s.log_scale).map_err(|e| CliError::Config(e.to_string()))
}

fn point_fields(pt: &ThermoPoint) -> [String; 8] {
    [
        fmt_num(pt.beta),
        fmt_num(pt.s_over_k),
        fmt_num(pt.s_a_over_k),
        fmt_num(pt.free_energy),
        fmt_num(pt.e_tilde),
        fmt_num(pt.q2),
        fmt_num(pt.residual),
        pt.iterations.to_string(),
    ]
}

pub fn cmd_beta(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.params(0.0, 10.0)?;
    let e = cfg.energy(0.2)?;
    let pt = microtemp::thermo::thermo_point(EnergyValue::scaled(e), &p).map_err(solver)?;
    let mut t = Table::new(["gamma", "E_paper", "beta", "S_over_K", "S_A_over_K", "q2", "residual", "iterations"]);
    t.push(vec![
        fmt_num(p.gamma),
        fmt_num(e),
        fmt_num(pt.beta),
        fmt_num(pt.s_over_k),
        fmt_num(pt.s_a_over_k),
        fmt_num(pt.q2),
        fmt_num(pt.residual),
        pt.iterations.to_string(),
    ]);
    Ok(t)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.params(0.0, 10.0)?;
    let e = cfg.energy(0.2)?;
    let s = cfg.sweep(gamma_grid(0.0, 5.0))?;
    let spec = SweepSpec {
        vary: s.vary,
        min: s.min,
        max: s.max,
        steps: s.steps,
        log_scale: s.log_scale,
        params: p,
        energy: EnergyValue::scaled(e),
    };
    let rows = sweep(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    let mut t = Table::new([
        "gamma",
        "wd_over_w0",
        "E_paper",
        "beta",
        "S_over_K",
        "S_A_over_K",
        "F",
        "E_tilde",
        "q2",
        "residual",
        "iterations",
        "status",
    ]);
    for r in rows {
        let mut row = vec![
            fmt_num(r.params.gamma),
            fmt_num(r.params.omega_d),
            fmt_num(r.energy.to_scaled(&r.params)),
        ];
        match &r.point {
            Ok(pt) => {
                row.extend(point_fields(pt));
                row.push("ok".into());
            }
            Err(err) => {
                row.extend((0..8).map(|_| "nan".to_string()));
                row.push(status(err).into());
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// One swept column set: label and the value at each grid point.
type Curve<'a> = (String, Box<dyn Fn(f64) -> microtemp::Result<f64> + Sync + 'a>);

fn curve_table(var: &str, xs: &[f64], curves: Vec<Curve<'_>>) -> Table {
    let mut header = vec![var.to_string()];
    header.extend(curves.iter().map(|c| c.0.clone()));
    header.push("status".into());
    let mut t = Table::new(header);
    for &x in xs {
        let mut row = vec![fmt_num(x)];
        let mut st = String::from("ok");
        for (label, f) in &curves {
            match f(x) {
                Ok(v) => row.push(fmt_num(v)),
                Err(e) => {
                    row.push("nan".into());
                    if st == "ok" {
                        st = format!("{label}:{}", status(&e));
                    }
                }
            }
        }
        row.push(st);
        t.push(row);
    }
    t
}

fn beta_at(p: ModelParams, e: f64) -> microtemp::Result<f64> {
    p.validate()?;
    Ok(beta_of_e(EnergyValue::scaled(e), &p)?.beta_star)
}

pub fn cmd_fig(n: u8, cfg: &RunConfig) -> Result<Table, CliError> {
    match n {
        1 => {
            let p = cfg.params(0.0, 10.0)?;
            let e = cfg.energy(0.2)?;
            let xs = values(&cfg.sweep(gamma_grid(0.0, 5.0))?)?;
            Ok(curve_table("gamma", &xs, vec![("beta".into(), Box::new(move |g| beta_at(p.with_gamma(g), e)))]))
        }
        2 => {
            let e = cfg.energy(10.0)?;
            let xs = values(&cfg.sweep(gamma_grid(0.0, 5.0))?)?;
            let wds = cfg.wd_over_w0.map_or(vec![1.0, 2.0, 10.0, 50.0], |w| vec![w]);
            let mut curves: Vec<Curve> = Vec::new();
            for wd in wds {
                let p = RunConfig { wd_over_w0: Some(wd), ..cfg.clone() }.params(0.0, wd)?;
                curves.push((format!("beta_wd{}", fmt_num(wd)), Box::new(move |g| beta_at(p.with_gamma(g), e))));
            }
            Ok(curve_table("gamma", &xs, curves))
        }
        3 => {
            let e = cfg.energy(10.0)?;
            let defaults = SweepConfig { vary: SweepVar::OmegaD, min: 0.5, max: 50.0, steps: 41, log_scale: true };
            let xs = values(&cfg.sweep(defaults)?)?;
            let gammas = cfg.gamma_over_w0.map_or(vec![0.5, 1.0, 2.0, 5.0], |g| vec![g]);
            let mut curves: Vec<Curve> = Vec::new();
            for g in gammas {
                let p = RunConfig { gamma_over_w0: Some(g), ..cfg.clone() }.params(g, 10.0)?;
                curves.push((format!("beta_gamma{}", fmt_num(g)), Box::new(move |wd| beta_at(p.with_omega_d(wd), e))));
            }
            Ok(curve_table("wd_over_w0", &xs, curves))
        }
        4 => {
            let p = cfg.params(0.0, 10.0)?;
            let e = cfg.energy(0.2)?;
            let xs = values(&cfg.sweep(gamma_grid(0.0, 5.0))?)?;
            Ok(curve_table(
                "gamma",
                &xs,
                vec![
                    ("full".into(), Box::new(move |g| beta_at(p.with_gamma(g), e))),
                    ("first_order".into(), Box::new(move |g| first_order_beta(EnergyValue::scaled(e), &p.with_gamma(g)))),
                ],
            ))
        }
        5 => {
            let p = cfg.params(0.0, 10.0)?;
            let energies = match cfg.energy_paper_units {
                Some(_) => vec![cfg.energy(0.2)?],
                None => vec![0.2, 1.0, 10.0],
            };
            let xs = values(&cfg.sweep(gamma_grid(0.0, 5.0))?)?;
            let curves: Vec<Curve> = energies
                .into_iter()
                .map(|e| -> Curve {
                    (
                        format!("q2_E{}", fmt_num(e)),
                        Box::new(move |g| {
                            let q = p.with_gamma(g);
                            q.validate()?;
                            q_squared_at(beta_of_e(EnergyValue::scaled(e), &q)?.beta_star, &q)
                        }),
                    )
                })
                .collect();
            Ok(curve_table("gamma", &xs, curves))
        }
        _ => Err(CliError::Config(format!("no figure {n}"))),
    }
}

pub fn cmd_oracle_compare(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.params(1.0, 10.0)?;
    let e = EnergyValue::scaled(cfg.energy(10.0)?);
    let modes = cfg.n_modes.clone().unwrap_or_else(|| vec![64, 256, 1024]);
    if let Some(&n) = modes.iter().find(|&&n| !(2..=4096).contains(&n)) {
        return Err(CliError::Config(format!("mode counts must lie in [2, 4096], got {n}")));
    }
    let cont = beta_of_e(e, &p).map_err(solver)?.beta_star;
    let mut t = Table::new(["N", "beta_finite", "beta_continuum", "rel_error", "status"]);
    for n in modes {
        let res = discretize_bath(&p, n, BathScheme::DrudeLorentzian)
            .and_then(|bath| normal_modes(&bath, &p).map(|m| (bath, m)))
            .and_then(|(bath, m)| finite_n_beta(&m, &bath, e, &p));
        let row = match res {
            Ok(sol) => {
                let b = sol.beta_star;
                let rel = if cont.is_infinite() && b.is_infinite() { 0.0 } else { (b - cont).abs() / cont };
                vec![n.to_string(), fmt_num(b), fmt_num(cont), fmt_num(rel), "ok".into()]
            }
            Err(err) => vec![n.to_string(), "nan".into(), fmt_num(cont), "nan".into(), status(&err).into()],
        };
        t.push(row);
    }
    Ok(t)
}
