use std::path::PathBuf;
use std::process::ExitCode;

use bsshell::commands::{self, Command};
use bsshell::config::RunConfig;
use bsshell::{CliError, RunContext};
use clap::{Parser, Subcommand};

/// Nonlinear Budiansky-Sanders shell toolkit.
#[derive(Debug, Parser)]
#[command(name = "bsshell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for reports.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Frames against finite differences of the chart, coercivity constant.
    GeometryCheck,
    /// Pointwise strain identities, linearization orders, metric remainder.
    VerifyKinematics,
    /// Minimize the energy from the zero field.
    Solve,
    /// Coercivity, Korn and equivalence constants with smallness diagnostics.
    EstimateConstants,
    /// Multi-start minimization at several start magnitudes.
    UniquenessProbe,
    /// Special force family: magnitude targets, linearity, support.
    ForceFamily,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::GeometryCheck => Command::GeometryCheck,
            Cmd::VerifyKinematics => Command::VerifyKinematics,
            Cmd::Solve => Command::Solve,
            Cmd::EstimateConstants => Command::EstimateConstants,
            Cmd::UniquenessProbe => Command::UniquenessProbe,
            Cmd::ForceFamily => Command::ForceFamily,
        }
    }
}

fn run(cli: &Cli) -> Result<bsshell::Outcome, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let (config, base) = RunConfig::load(path)?;
    let ctx = RunContext {
        out: cli.out.clone(),
        seed: cli.seed,
        quiet: cli.quiet,
    };
    commands::run(cli.command.into(), &config, &base, &ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if !cli.quiet {
                for line in &outcome.summary {
                    println!("{line}");
                }
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("bsshell: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
