use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use symbreak::config::{parse_config, RunConfig, Scenario};
use symbreak::runner::{emit, run_scenario, write_output, RunError};

#[derive(Parser)]
#[command(name = "symbreak", version, about = "Collective phase space of a cranked oscillator mean field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output file (overrides output.path; stdout if neither is given)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the cranked state over a grid of angular velocities
    CrankSweep(Io),
    /// Yrast curve on a grid of angular momenta
    Yrast(Io),
    /// Check that angle and angular momentum are canonically conjugate
    CanonicalCheck(Io),
    /// Check that the ground-state orbit is isotropic
    IsotropyCheck(Io),
    /// Two-fluid scissors mode analysis
    Scissors(Io),
    /// Angular momentum shift rate under the angle operator
    AngleShift(Io),
    /// Parse and validate a configuration without computing
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

fn run(io: &Io, expected: Scenario) -> Result<(), RunError> {
    let config = load(&io.config)?;
    if config.scenario.scenario != expected {
        return Err(RunError::Validation {
            key: "scenario.name".into(),
            message: format!(
                "config is for `{}` but the `{}` subcommand was invoked",
                config.scenario.scenario.name(),
                expected.name()
            ),
        });
    }
    let table = run_scenario(&config)?;
    let text = emit(&table, config.output.format, config.output.precision);
    write_output(&text, io.out.as_deref().or(config.output.path.as_deref()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::CrankSweep(io) => run(io, Scenario::CrankSweep),
        Command::Yrast(io) => run(io, Scenario::Yrast),
        Command::CanonicalCheck(io) => run(io, Scenario::CanonicalCheck),
        Command::IsotropyCheck(io) => run(io, Scenario::IsotropyCheck),
        Command::Scissors(io) => run(io, Scenario::Scissors),
        Command::AngleShift(io) => run(io, Scenario::AngleShift),
        Command::Validate { config } => load(config).map(|c| {
            println!("ok: {}", c.scenario.scenario.name());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
