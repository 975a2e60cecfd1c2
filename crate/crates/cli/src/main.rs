use clap::{Parser, Subcommand};
use obh_cli::commands::{self, CommandError};
use obh_cli::{RunConfig, Scenario};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Two atoms next to a layered optical black hole: collective rates, dipole
/// shifts and entanglement negativity.
#[derive(Parser, Debug)]
#[command(name = "obh", version, about)]
struct Cli {
    /// TOML configuration; defaults are used for absent keys or files.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file (overrides `output.path`); stdout when neither is set.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Overrides the configured scenario.
    #[arg(long, global = true, value_enum)]
    scenario: Option<Scenario>,
    /// Report negativity with maximum 1 instead of 1/2.
    #[arg(long, global = true)]
    doubled_negativity: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decay rates and dipole-dipole shifts in units of the free-space rate.
    Rates,
    /// Negativity trace over the configured time grid, as CSV.
    Negativity,
    /// Point value of the zz Green element.
    Greens,
    /// Sensitivity of the collective rates to the numerical parameters.
    Convergence,
}

fn run(cli: &Cli) -> Result<(), (i32, String)> {
    let config_err = |m: String| (2, m);
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| config_err(e.0))?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.scenario {
        cfg.scenario = s;
    }
    if let Some(p) = &cli.out {
        cfg.output.path = Some(p.clone());
    }
    cfg.validate().map_err(|e| config_err(e.0))?;

    let text = match cli.command {
        Command::Rates => commands::rates(&cfg),
        Command::Negativity => commands::negativity(&cfg, cli.doubled_negativity),
        Command::Greens => commands::greens(&cfg),
        Command::Convergence => commands::convergence(&cfg),
    }
    .map_err(|e: CommandError| (e.exit_code(), e.to_string()))?;

    let written = match &cfg.output.path {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| (1, format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("obh: {message}");
            ExitCode::from(code as u8)
        }
    }
}
