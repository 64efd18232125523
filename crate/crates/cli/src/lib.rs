//! Command-line front end for the microcanonical temperature library.

pub mod commands;
pub mod config;
pub mod table;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{parse_modes, parse_vary, RunConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "microtemp", version, about = "Microcanonical temperature of an oscillator in a Drude bath")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// key = value file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// write CSV here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// γ/ω₀
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// energy in units of ħω₀/2π
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// ω_D/ω₀
    #[arg(long = "wd-ratio", global = true, allow_negative_numbers = true)]
    pub wd_ratio: Option<f64>,
    /// κω₀³
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub max: Option<f64>,
    /// logarithmic grid
    #[arg(long, global = true)]
    pub log: bool,
    /// swept variable: gamma, energy or omega_d
    #[arg(long, global = true)]
    pub vary: Option<String>,
    /// bath sizes for oracle-compare, comma separated
    #[arg(long, global = true)]
    pub modes: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// β and entropies at one energy
    Beta,
    /// β against γ at low energy
    Fig1,
    /// β against γ for several cutoffs
    Fig2,
    /// β against the cutoff for several γ
    Fig3,
    /// full β against its first-order expansion in γ
    Fig4,
    /// ⟨q²⟩ against γ
    Fig5,
    /// thermodynamics along a one-parameter grid
    Sweep,
    /// continuum β against an exactly diagonalized finite bath
    OracleCompare,
}

impl Cli {
    fn flags(&self) -> Result<RunConfig, CliError> {
        let vary = match &self.vary {
            Some(v) => Some(parse_vary(v).ok_or_else(|| CliError::Config(format!("--vary: unknown variable '{v}'")))?),
            None => None,
        };
        let modes = match &self.modes {
            Some(m) => Some(parse_modes(m).ok_or_else(|| CliError::Config(format!("--modes: bad list '{m}'")))?),
            None => None,
        };
        for (name, v) in [("gamma", self.gamma), ("energy", self.energy), ("wd-ratio", self.wd_ratio), ("kappa", self.kappa), ("min", self.min), ("max", self.max)] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(CliError::Config(format!("--{name} must be finite")));
            }
        }
        Ok(RunConfig {
            kappa_w0_cubed: self.kappa,
            wd_over_w0: self.wd_ratio,
            gamma_over_w0: self.gamma,
            energy_paper_units: self.energy,
            sweep_vary: vary,
            sweep_min: self.min,
            sweep_max: self.max,
            sweep_steps: self.steps,
            sweep_log: self.log.then_some(true),
            n_modes: modes,
            output_path: self.out.clone(),
        })
    }

    /// The config file, if any, with flags applied on top.
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(base.merged(self.flags()?))
    }
}

/// Builds the CSV for one command.
pub fn render(command: Command, cfg: &RunConfig) -> Result<String, CliError> {
    let table = match command {
        Command::Beta => commands::cmd_beta(cfg)?,
        Command::Fig1 => commands::cmd_fig(1, cfg)?,
        Command::Fig2 => commands::cmd_fig(2, cfg)?,
        Command::Fig3 => commands::cmd_fig(3, cfg)?,
        Command::Fig4 => commands::cmd_fig(4, cfg)?,
        Command::Fig5 => commands::cmd_fig(5, cfg)?,
        Command::Sweep => commands::cmd_sweep(cfg)?,
        Command::OracleCompare => commands::cmd_oracle_compare(cfg)?,
    };
    table.to_csv()
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = cli.run_config()?;
    let csv = render(cli.command, &cfg)?;
    match &cfg.output_path {
        Some(path) => std::fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(csv.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Runs the program on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "microtemp: {e}");
            e.exit_code()
        }
    }
}
