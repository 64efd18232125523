//! Run configuration: a flat `key = value` file, overridden by flags.

use std::path::{Path, PathBuf};

use microtemp::qbm::ModelParams;
use microtemp::thermo::SweepVar;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub vary: SweepVar,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub log_scale: bool,
}

/// Everything a subcommand needs, in dimensionless units.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub kappa_w0_cubed: Option<f64>,
    pub wd_over_w0: Option<f64>,
    pub gamma_over_w0: Option<f64>,
    pub energy_paper_units: Option<f64>,
    pub sweep_vary: Option<SweepVar>,
    pub sweep_min: Option<f64>,
    pub sweep_max: Option<f64>,
    pub sweep_steps: Option<usize>,
    pub sweep_log: Option<bool>,
    pub n_modes: Option<Vec<usize>>,
    pub output_path: Option<PathBuf>,
}

pub const KEYS: [&str; 11] = [
    "kappa_w0_cubed",
    "wd_over_w0",
    "gamma_over_w0",
    "energy_paper_units",
    "sweep_vary",
    "sweep_min",
    "sweep_max",
    "sweep_steps",
    "sweep_log",
    "n_modes",
    "output_path",
];

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

fn number(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v.parse().map_err(|_| bad(line, format!("{key}: not a number: '{v}'")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(line, format!("{key}: must be finite")))
    }
}

pub fn parse_vary(v: &str) -> Option<SweepVar> {
    match v {
        "gamma" => Some(SweepVar::Gamma),
        "energy" => Some(SweepVar::Energy),
        "omega_d" | "wd" => Some(SweepVar::OmegaD),
        _ => None,
    }
}

pub fn parse_modes(v: &str) -> Option<Vec<usize>> {
    v.split(',').map(|s| s.trim().parse().ok()).collect()
}

impl RunConfig {
    /// Parses the text of a config file. Blank lines and `#` comments are
    /// skipped; unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad(n, format!("expected key = value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(bad(n, format!("unknown key '{key}'")));
            }
            if seen.contains(&key) {
                return Err(bad(n, format!("duplicate key '{key}'")));
            }
            seen.push(key);
            match key {
                "kappa_w0_cubed" => cfg.kappa_w0_cubed = Some(number(n, key, value)?),
                "wd_over_w0" => cfg.wd_over_w0 = Some(number(n, key, value)?),
                "gamma_over_w0" => cfg.gamma_over_w0 = Some(number(n, key, value)?),
                "energy_paper_units" => cfg.energy_paper_units = Some(number(n, key, value)?),
                "sweep_min" => cfg.sweep_min = Some(number(n, key, value)?),
                "sweep_max" => cfg.sweep_max = Some(number(n, key, value)?),
                "sweep_steps" => {
                    cfg.sweep_steps = Some(value.parse().map_err(|_| bad(n, format!("{key}: not a count: '{value}'")))?)
                }
                "sweep_log" => {
                    cfg.sweep_log = Some(match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(bad(n, format!("{key}: expected true or false"))),
                    })
                }
                "sweep_vary" => {
                    cfg.sweep_vary =
                        Some(parse_vary(value).ok_or_else(|| bad(n, format!("{key}: expected gamma, energy or omega_d")))?)
                }
                "n_modes" => {
                    cfg.n_modes =
                        Some(parse_modes(value).ok_or_else(|| bad(n, format!("{key}: expected comma-separated counts")))?)
                }
                "output_path" => cfg.output_path = Some(PathBuf::from(value)),
                _ => unreachable!(),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Fields set in `other` win.
    pub fn merged(mut self, other: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            kappa_w0_cubed,
            wd_over_w0,
            gamma_over_w0,
            energy_paper_units,
            sweep_vary,
            sweep_min,
            sweep_max,
            sweep_steps,
            sweep_log,
            n_modes,
            output_path
        );
        self
    }

    pub fn params(&self, gamma_default: f64, wd_default: f64) -> Result<ModelParams, CliError> {
        ModelParams::from_ratios(
            self.kappa_w0_cubed.unwrap_or(5.0),
            self.wd_over_w0.unwrap_or(wd_default),
            self.gamma_over_w0.unwrap_or(gamma_default),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn energy(&self, default: f64) -> Result<f64, CliError> {
        let e = self.energy_paper_units.unwrap_or(default);
        if e >= 0.0 {
            Ok(e)
        } else {
            Err(CliError::Config(format!("energy_paper_units must be >= 0, got {e}")))
        }
    }

    /// Sweep grid with per-command defaults filled in and checked.
    pub fn sweep(&self, defaults: SweepConfig) -> Result<SweepConfig, CliError> {
        let s = SweepConfig {
            vary: self.sweep_vary.unwrap_or(defaults.vary),
            min: self.sweep_min.unwrap_or(defaults.min),
            max: self.sweep_max.unwrap_or(defaults.max),
            steps: self.sweep_steps.unwrap_or(defaults.steps),
            log_scale: self.sweep_log.unwrap_or(defaults.log_scale),
        };
        microtemp::thermo::grid(s.min, s.max, s.steps, s.log_scale).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(s)
    }
}
