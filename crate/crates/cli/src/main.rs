//! `qbm-lab`: reproducible experiment runner for `qbm-core`.
//!
//! Exit codes: 0 success, 1 check failed, 2 invalid input.

mod commands;
mod config;
mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Debug)]
pub enum Failure {
    /// Bad configuration, spec file or parameters (exit 2).
    Input(String),
    /// The computation ran but a check did not hold (exit 1).
    Check(String),
}

#[derive(Parser, Debug)]
#[command(name = "qbm-lab", version, about = "Quantum Brownian motion experiments on the noncommutative torus")]
struct Cli {
    /// TOML config; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Path count for the Monte Carlo subcommands.
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Grid size for the circle functions.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Print the effective config as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Build the trapezoid projection and check P² = P = P* and its trace.
    VerifyProjection,
    /// Compare iterated meets of two translates with the closed form.
    MeetDemo,
    /// Monte Carlo vacuum expectation against the exact heat semigroup.
    SemigroupCheck,
    /// Exit-time series, fit and invariants for a convergent family.
    ExitAsymptotics,
    /// Validate generator spec files.
    GeneratorCheck,
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.general.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.general.out_dir = out.clone();
    }
    if let Some(paths) = cli.paths {
        cfg.semigroup.n_paths = paths;
        cfg.exit.n_paths = paths;
    }
    if let Some(grid) = cli.grid {
        cfg.general.grid = grid;
        cfg.meet.grid = grid;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let cfg = effective_config(cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        return Err(Failure::Input("no subcommand given; see --help".into()));
    };
    let outcome = match command {
        Command::VerifyProjection => commands::verify_projection(&cfg),
        Command::MeetDemo => commands::meet_demo(&cfg),
        Command::SemigroupCheck => commands::semigroup_check(&cfg),
        Command::ExitAsymptotics => commands::exit_asymptotics(&cfg),
        Command::GeneratorCheck => commands::generator_check(&cfg),
    }?;
    println!("{}", outcome.message);
    if outcome.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("check failed");
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
