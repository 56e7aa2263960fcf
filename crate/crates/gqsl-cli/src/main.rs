//! `gqsl` — speeds and speed-limit times of Gaussian states from the
//! command line. Scenarios come from a JSON config file; a handful of
//! flags override individual fields, and flags always win.

use clap::{Parser, Subcommand};
use gqsl_cli::config::{ScalarOrList, ScenarioConfig};
use gqsl_cli::{commands, output, selftest, CliError, EXIT_SELFTEST_FAILED};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gqsl",
    version,
    about = "Quantum speeds and speed-limit times of Gaussian states",
    after_help = "Exit codes: 0 success, 1 selftest failure, 2 configuration error, \
                  3 numerical failure."
)]
struct Cli {
    /// JSON scenario file (all keys optional; unknown keys rejected)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the artifact to this file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Grid resolution for the sweep commands
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Instantaneous speed of the configured state, as one JSON line
    Speed,
    /// Normalized single-mode speed profiles over the orientation angle (CSV)
    Fig2,
    /// Damped-oscillator speed-limit times over a temperature sweep (CSV)
    Fig3 {
        /// system-sweep (vary the state temperature) or bath-sweep
        #[arg(long, value_name = "MODE")]
        mode: Option<String>,

        /// Squeezing parameters, one tau column each (negative flips the axis)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
        r: Option<Vec<f64>>,

        /// Inverse temperature held fixed on the non-swept side
        #[arg(long, value_name = "BETA")]
        fixed: Option<f64>,

        /// Damping rate of the oscillator
        #[arg(long, value_name = "GAMMA")]
        gamma: Option<f64>,

        /// Oscillator frequency
        #[arg(long, value_name = "OMEGA")]
        omega: Option<f64>,
    },
    /// Speed versus a diverging parameter: hbar, squeezing, or modes (CSV)
    Scaling {
        /// Which limit to sweep: hbar, squeezing, or modes
        limit: Option<String>,
    },
    /// Integrate the dynamics; trajectory CSV with speed-limit times
    Evolve,
    /// Run the built-in verification battery
    Selftest {
        /// Phase-space quadrature points per axis for the fidelity check
        #[arg(long, value_name = "N")]
        oracle_grid: Option<usize>,
    },
}

fn merge_flags(config: &mut ScenarioConfig, cli: &Cli) {
    if let Some(samples) = cli.samples {
        config.samples = Some(samples);
    }
    match &cli.command {
        Command::Fig3 { mode, r, fixed, gamma, omega } => {
            if let Some(mode) = mode {
                config.mode = Some(mode.clone());
            }
            if let Some(r) = r {
                config.r = Some(ScalarOrList::List(r.clone()));
            }
            if let Some(fixed) = fixed {
                config.fixed = Some(*fixed);
            }
            if let Some(gamma) = gamma {
                config.gamma = Some(*gamma);
            }
            if let Some(omega) = omega {
                config.omega = Some(*omega);
            }
        }
        Command::Scaling { limit: Some(limit) } => {
            config.limit = Some(limit.clone());
        }
        _ => {}
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    if let Command::Selftest { oracle_grid } = &cli.command {
        let (report, ok) = selftest::run_selftest(*oracle_grid);
        output::write_output(cli.out.as_deref(), &report)?;
        return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_SELFTEST_FAILED as u8) });
    }

    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    merge_flags(&mut config, cli);
    let hash = config.canonical_hash();

    let artifact = match &cli.command {
        Command::Speed => commands::cmd_speed(&config)?,
        Command::Fig2 => commands::cmd_fig2(&config, &hash)?,
        Command::Fig3 { .. } => commands::cmd_fig3(&config, &hash)?,
        Command::Scaling { .. } => commands::cmd_scaling(&config, &hash)?,
        Command::Evolve => commands::cmd_evolve(&config, &hash)?,
        Command::Selftest { .. } => unreachable!("handled above"),
    };
    output::write_output(cli.out.as_deref(), &artifact)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
