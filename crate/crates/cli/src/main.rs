//! `qhj`: eigenvalues, benchmark table and wavefunction series from the
//! quantum Hamilton–Jacobi shooting solver.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use qhj_core::{PhysicalConstants, PotentialSpec, SeriesSelector};

use crate::config::{BPolicy, CommandKind, Compare, Format, LevelRange, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "qhj", version, about = "Bound states of 1D confining potentials via the quantum Hamilton-Jacobi equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues for one quantum number or an inclusive range.
    #[command(allow_negative_numbers = true)]
    Eigen(EigenArgs),
    /// The 12 quartic-oscillator benchmark levels (k = 1, ħ = m = 1).
    #[command(allow_negative_numbers = true)]
    Table1(Table1Args),
    /// Normalized wavefunction and action/momentum/envelope series.
    #[command(allow_negative_numbers = true)]
    Wavefn(WavefnArgs),
}

/// Tolerances and output; shared by every subcommand.
#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Absolute width of the final energy bracket.
    #[arg(long)]
    tol_e: Option<f64>,
    /// Relative ODE tolerance (absolute tolerance defaults to 1% of it).
    #[arg(long)]
    ode_tol: Option<f64>,
    /// Absolute ODE tolerance.
    #[arg(long)]
    ode_abs_tol: Option<f64>,
    /// Decay exponent ∫κ dx/ħ accumulated between turning point and cutoff.
    #[arg(long)]
    decay_budget: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-run from a previous output file or a configuration JSON; explicit
    /// flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Potential and physical constants.
#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// e.g. '{"kind":"quartic","k":1,"lambda":1}'
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
}

#[derive(Args, Debug)]
struct EigenArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Quantum number `n` or inclusive range `a..b`.
    #[arg(long)]
    n: Option<String>,
    /// `auto`, `bstar` (adds b* columns) or a positive value used while shooting.
    #[arg(long)]
    b: Option<String>,
    #[arg(long, value_enum)]
    compare: Option<Compare>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct Table1Args {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct WavefnArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Quantum number of the state.
    #[arg(long)]
    n: Option<String>,
    /// Pick the level nearest this energy instead of giving `n`.
    #[arg(long, conflicts_with = "n")]
    energy: Option<f64>,
    /// `bstar` (default), `auto` or a positive value.
    #[arg(long)]
    b: Option<String>,
    /// Extra series: action_real, action_imag, momentum, envelope (psi is always written).
    #[arg(long, value_delimiter = ',')]
    series: Vec<String>,
    /// Number of points on the export grid.
    #[arg(long)]
    points: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

fn base_config(command: CommandKind, run: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &run.config {
        Some(path) => config::load(path)?,
        None => RunConfig::defaults(command),
    };
    if cfg.command != command {
        return Err(CliError::config(format!(
            "configuration is for '{}', not '{}'",
            cfg.command.name(),
            command.name()
        )));
    }
    if let Some(v) = run.tol_e {
        cfg.tol_e = v;
    }
    if let Some(v) = run.ode_tol {
        cfg.ode_rel_tol = v;
        cfg.ode_abs_tol = run.ode_abs_tol.unwrap_or(1e-2 * v);
    }
    if let Some(v) = run.ode_abs_tol {
        cfg.ode_abs_tol = v;
    }
    if let Some(v) = run.decay_budget {
        cfg.decay_budget = v;
    }
    if let Some(v) = run.format {
        cfg.format = v;
    }
    cfg.out = run.out.clone();
    Ok(cfg)
}

fn apply_model(cfg: &mut RunConfig, model: &ModelArgs) -> Result<(), CliError> {
    if let Some(text) = &model.potential {
        let spec: PotentialSpec =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid --potential: {e}")))?;
        cfg.potential = Some(spec);
    }
    let hbar = model.hbar.unwrap_or(cfg.constants.hbar);
    let mass = model.mass.unwrap_or(cfg.constants.mass);
    cfg.constants = PhysicalConstants::new(hbar, mass)?;
    Ok(())
}

fn parse_flag<T: std::str::FromStr<Err = String>>(v: &Option<String>) -> Result<Option<T>, CliError> {
    v.as_deref().map(str::parse).transpose().map_err(CliError::config)
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.command {
        Command::Eigen(a) => {
            let mut cfg = base_config(CommandKind::Eigen, &a.run)?;
            apply_model(&mut cfg, &a.model)?;
            if let Some(n) = parse_flag::<LevelRange>(&a.n)? {
                cfg.n = n;
            }
            if let Some(b) = parse_flag::<BPolicy>(&a.b)? {
                cfg.b = b;
            }
            if a.compare.is_some() {
                cfg.compare = a.compare;
            }
            Ok(cfg)
        }
        Command::Table1(a) => base_config(CommandKind::Table1, &a.run),
        Command::Wavefn(a) => {
            let mut cfg = base_config(CommandKind::Wavefn, &a.run)?;
            apply_model(&mut cfg, &a.model)?;
            if let Some(n) = parse_flag::<LevelRange>(&a.n)? {
                cfg.n = n;
                cfg.energy = None;
            }
            if a.energy.is_some() {
                cfg.energy = a.energy;
            }
            if let Some(b) = parse_flag::<BPolicy>(&a.b)? {
                cfg.b = b;
            }
            if !a.series.is_empty() {
                cfg.series = a
                    .series
                    .iter()
                    .map(|s| s.trim().parse::<SeriesSelector>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::config(format!("--series expects a list of {:?}", series_names())))?;
            }
            if let Some(p) = a.points {
                cfg.points = p;
            }
            Ok(cfg)
        }
    }
}

fn series_names() -> Vec<&'static str> {
    SeriesSelector::ALL.iter().map(|s| s.name()).collect()
}

fn main() -> ExitCode {
    let result = Cli::try_parse()
        .or_else(|e| match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                e.exit()
            }
            _ => Err(CliError::Config { kind: "InvalidArguments".into(), message: e.render().to_string() }),
        })
        .and_then(|cli| build_config(&cli))
        .and_then(commands::run)
        .and_then(|report| report.emit());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
