use clap::{Parser, Subcommand};
use explicate_cli::{catalogue, run_scenario, RunError, RunOptions, ScenarioConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 pass, 1 check failure, 2 config error, 3 runtime error.
#[derive(Parser)]
#[command(name = "explicate", version, about = "Scenario runner: configure, run, verify, export")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config file.
    Run {
        /// Path to the scenario config (JSON, versioned schema).
        config: PathBuf,
        /// Write artifacts here instead of the config's output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Reserved; no scenario consumes randomness by default.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress the per-check report on stdout.
        #[arg(long)]
        quiet: bool,
    },
    /// List the available scenario kinds.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", catalogue());
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            output_dir,
            seed: _seed,
            quiet,
        } => {
            let config = match ScenarioConfig::from_path(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { output_dir, quiet };
            match run_scenario(&config, &opts) {
                Ok(report) => {
                    if !quiet {
                        print!("{}", report.render_text());
                    }
                    if report.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(RunError::Config(e)) => {
                    eprintln!("config error: {e}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
    }
}
