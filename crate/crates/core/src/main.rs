use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mgscalar::cli;

#[derive(Parser)]
#[command(
    name = "mgscalar",
    about = "Pseudo-spectral active scalar solver on the torus with level-set diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation, writing snapshots and the time-series CSV
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to output.dir from the config)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the configured velocity operator: defects, growth constant,
    /// curved-region table
    Symbols {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the configured diagnostics over stored snapshots
    Diagnose {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vanishing-regularization convergence study
    EpsilonStudy {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated decreasing list, e.g. 1e-1,5e-2,2.5e-2
        #[arg(long)]
        epsilons: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, out } => cli::cmd_run(config, out.as_deref()).map(|summary| {
            println!(
                "run complete: {} steps, {} snapshots, |theta(T)|_2 = {:.6e}, max energy residual {:.3e}",
                summary.steps,
                summary.samples.len(),
                summary.final_l2,
                summary.max_energy_residual()
            );
        }),
        Command::Symbols { config, out } => cli::cmd_symbols(config, out).map(|()| {
            println!("symbol scan written to {}", out.display());
        }),
        Command::Diagnose {
            config,
            snapshots,
            out,
        } => cli::cmd_diagnose(config, snapshots, out.as_deref()).map(|report| {
            println!(
                "diagnostics over {} snapshots: {}",
                report.snapshots,
                if report.all_satisfied() {
                    "all checks satisfied"
                } else {
                    "violations found (see report)"
                }
            );
        }),
        Command::EpsilonStudy {
            config,
            epsilons,
            out,
        } => cli::parse_epsilons(epsilons)
            .and_then(|eps| cli::cmd_epsilon_study(config, &eps, out.as_deref()))
            .map(|report| {
                println!(
                    "epsilon study: distances decreasing = {}, uniform bound = {}",
                    report.distances_decreasing, report.uniform_bound_holds
                );
            }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
