//! `riskmin`: scenario runner for dynamic risk minimization on a
//! non-tradable index.
//!
//! Exit codes: 0 success, 2 validation failure, 3 infeasible scenario,
//! 4 numerical failure.

mod commands;
mod config;
mod emit;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use commands::{CliError, RunContext};
use config::ScenarioConfig;

#[derive(Parser)]
#[command(
    name = "riskmin",
    version,
    about = "Dynamic risk minimization: strategies, prices and hedges on a non-tradable index"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the configured Monte Carlo path count.
    #[arg(long, global = true)]
    paths: Option<usize>,

    /// Override the configured step count.
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,

    /// Stamp report headers with the generation time (off by default so
    /// identical runs produce identical bytes).
    #[arg(long, global = true)]
    timestamps: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate index paths and summarize them per grid point.
    Simulate,
    /// Tabulate the generator's polar function over a mu grid.
    Polar,
    /// Feasibility, optimal strategy table and minimal-risk value curve.
    Strategy,
    /// Backward-solver risk of the closed-form strategy vs quadrature.
    Risk,
    /// Monte Carlo risk-indifference price of the configured payoff.
    Price,
    /// Malliavin hedge of the configured payoff with diagnostics.
    Hedge,
    /// Run the shipped verification matrix.
    Verify,
}

fn load_context(cli: &Cli) -> Result<RunContext, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation(vec!["--config <path> is required".into()]))?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(vec![format!("cannot read {}: {e}", path.display())])
    })?;
    let mut config =
        ScenarioConfig::parse(&text).map_err(|e| CliError::Validation(vec![e]))?;

    // Flag overrides are part of the resolved configuration.
    if let Some(seed) = cli.seed {
        config.grid.seed = seed;
    }
    if let Some(paths) = cli.paths {
        config.grid.n_paths = paths;
    }
    if let Some(steps) = cli.steps {
        config.grid.n_steps = steps;
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.display().to_string();
    }

    let issues = config.validate();
    if !issues.is_empty() {
        return Err(CliError::Validation(issues));
    }

    let timestamp = if cli.timestamps {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    } else {
        None
    };

    Ok(RunContext {
        out_dir: PathBuf::from(&config.output.dir),
        config,
        quiet: cli.quiet,
        timestamp,
    })
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let ctx = load_context(cli)?;
    match cli.command {
        Command::Simulate => commands::run_simulate(&ctx),
        Command::Polar => commands::run_polar(&ctx),
        Command::Strategy => commands::run_strategy(&ctx),
        Command::Risk => commands::run_risk(&ctx),
        Command::Price => commands::run_price(&ctx),
        Command::Hedge => commands::run_hedge(&ctx),
        Command::Verify => commands::run_verify(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Validation(issues) => {
                    for issue in issues {
                        eprintln!("config error: {issue}");
                    }
                }
                CliError::Infeasible(report) => {
                    eprintln!(
                        "infeasible scenario: regime {:?}, margin {} at (s = {}, r = {})",
                        report.regime, report.margin, report.witness.0, report.witness.1
                    );
                }
                CliError::Numerical(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
