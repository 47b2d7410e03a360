use std::path::PathBuf;
use std::process::ExitCode;

use cavity_cli::error::{CliError, EXIT_OK};
use cavity_cli::{run, Command};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavity", version, about = "Time-harmonic Maxwell cavity solver")]
struct Cli {
    /// Worker threads for element loops and multi-solve commands.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for reports and exported fields.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check materials and boundary impedances.
    Validate { config: PathBuf },
    /// Solve at a single frequency.
    Solve { config: PathBuf },
    /// Frequency sweep with resonance detection.
    Sweep { config: PathBuf },
    /// Limiting-absorption continuation δ → 0.
    La { config: PathBuf },
    /// Solve and write the field as legacy VTK.
    Export { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(cavity_cli::error::EXIT_VALIDATION);
        }
    }
    let (command, config) = match cli.command {
        Sub::Validate { config } => (Command::Validate, config),
        Sub::Solve { config } => (Command::Solve, config),
        Sub::Sweep { config } => (Command::Sweep, config),
        Sub::La { config } => (Command::La, config),
        Sub::Export { config } => (Command::Export, config),
    };
    let outcome = run(command, &config, cli.output.as_deref());
    print!("{}", outcome.report);
    if let Some(dir) = &cli.output {
        if !outcome.report.is_empty() {
            let path = dir.join(format!("{}.txt", command.name()));
            let written = std::fs::create_dir_all(dir).and_then(|()| std::fs::write(&path, &outcome.report));
            if let Err(e) = written {
                return fail(&CliError::Io(format!("{}: {e}", path.display())));
            }
        }
    }
    match outcome.status {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
