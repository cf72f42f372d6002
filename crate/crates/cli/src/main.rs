//! `bec-thermo`: parameter sweeps that emit plot-ready data as CSV or JSON.

use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use bec_thermo::dephasing::QuadratureSpec;
use bec_thermo::optimizer::GammaSource;
use bec_thermo::params::PhysicalConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod output;
mod units;

use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "bec-thermo",
    version,
    about = "Impurity-qubit thermometry of a quasi-1D BEC"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// `key = value` parameter file; the built-in baseline if omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Random seed (used by `mc`, recorded everywhere).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance of the Γ quadrature.
    #[arg(long, global = true, default_value_t = QuadratureSpec::default().rel_tol)]
    rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Numeric,
    Ohmic,
}

impl From<Source> for GammaSource {
    fn from(s: Source) -> Self {
        match s {
            Source::Numeric => GammaSource::Numeric,
            Source::Ohmic => GammaSource::Ohmic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Numeric,
    Transcendental,
    Series,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Temperature,
    AAb,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// QSNR on a (T, ω_T t) grid.
    QsnrScan {
        /// Temperatures in nK.
        #[arg(long, default_value = "0.1:1:10")]
        temps: String,
        /// Dimensionless times ω_T t.
        #[arg(long, default_value = "0:30:301")]
        times: String,
        #[arg(long, value_enum, default_value_t = Source::Numeric)]
        source: Source,
    },
    /// Optimal encoding time and QSNR against temperature or a_AB.
    ToptScan {
        #[arg(long, value_enum, default_value_t = Sweep::Temperature)]
        sweep: Sweep,
        /// Sweep values: nK for temperature, nm for a_AB.
        #[arg(long)]
        values: Option<String>,
        /// Fixed temperature in nK for an a_AB sweep.
        #[arg(long, default_value_t = 0.5)]
        temp: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// Γ source for the numeric method.
        #[arg(long, value_enum, default_value_t = Source::Numeric)]
        source: Source,
        /// Expansion temperature in nK for the series time.
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
    },
    /// Minimum relative error 1/√(ν Q_opt) against temperature.
    Relerr {
        #[arg(long, default_value = "400,600,1000")]
        nu: String,
        /// Temperatures in nK.
        #[arg(long, default_value = "0.1:1:10")]
        temps: String,
        #[arg(long, value_enum, default_value_t = Source::Numeric)]
        source: Source,
    },
    /// Coherence |ρ_eg| = e^{-Γ}/2 against physical time.
    Coherence {
        /// Temperatures in nK.
        #[arg(long, default_value = "0.01,0.03,0.05")]
        temps: String,
        /// Times in seconds.
        #[arg(long, default_value = "0:100:201")]
        times: String,
        /// Ohmic coupling override; `a_AB` is rescaled to match.
        #[arg(long, default_value_t = 0.004, conflicts_with = "config_eta")]
        eta: f64,
        /// Keep the coupling implied by the config instead.
        #[arg(long)]
        config_eta: bool,
        #[arg(long, value_enum, default_value_t = Source::Ohmic)]
        source: Source,
    },
    /// Monte Carlo Ramsey measurements and MLE against the Cramér-Rao bound.
    Mc {
        /// True temperature in nK.
        #[arg(long, default_value_t = 0.5)]
        temp: f64,
        #[arg(long, default_value = "1000")]
        nu: String,
        #[arg(long, default_value_t = 500)]
        trials: u64,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<PhysicalConfig> {
    let Some(path) = path else {
        return Ok(PhysicalConfig::baseline());
    };
    let bad = |e: String| CliError::Usage(format!("{}: {e}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    PhysicalConfig::parse_with(&text, units::config_value).map_err(|e| bad(e.to_string()))
}

fn run(cli: Cli) -> Result<output::ScanResult> {
    let g = &cli.global;
    let config = load_config(g.config.as_ref())?;
    let quadrature = QuadratureSpec {
        rel_tol: g.rel_tol,
        ..QuadratureSpec::default()
    };
    let ctx = commands::Context::new(
        config,
        quadrature,
        g.seed,
        std::env::args().skip(1).collect(),
    );
    let usage = |e: String| CliError::Usage(e);
    match cli.command {
        Command::QsnrScan {
            temps,
            times,
            source,
        } => ctx.qsnr_scan(
            &units::grid(&temps).map_err(usage)?,
            &units::grid(&times).map_err(usage)?,
            source.into(),
        ),
        Command::ToptScan {
            sweep,
            values,
            temp,
            method,
            source,
            t0,
        } => {
            let default = match sweep {
                Sweep::Temperature => "0.1:1:10",
                Sweep::AAb => "1:5:9",
            };
            let values = units::grid(values.as_deref().unwrap_or(default)).map_err(usage)?;
            ctx.topt_scan(sweep, &values, temp, method, source.into(), t0)
        }
        Command::Relerr { nu, temps, source } => ctx.relerr(
            &units::counts(&nu).map_err(usage)?,
            &units::grid(&temps).map_err(usage)?,
            source.into(),
        ),
        Command::Coherence {
            temps,
            times,
            eta,
            config_eta,
            source,
        } => ctx.coherence(
            &units::grid(&temps).map_err(usage)?,
            &units::grid(&times).map_err(usage)?,
            (!config_eta).then_some(eta),
            source.into(),
        ),
        Command::Mc { temp, nu, trials } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be positive".into()));
            }
            ctx.mc(temp, &units::counts(&nu).map_err(usage)?, trials)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.global.format == Format::Json;
    let out = cli.global.out.clone();
    let result = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let written = match &out {
        Some(path) => fs::File::create(path)
            .and_then(|f| result.write(json, io::BufWriter::new(f)))
            .map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            }),
        None => result
            .write(json, io::stdout().lock())
            .map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    if result.numerical_failures > 0 {
        eprintln!(
            "error: {} point(s) did not converge; see the status columns",
            result.numerical_failures
        );
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
