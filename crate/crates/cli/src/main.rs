use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsensing_cli::{catalog, run_config, Overrides};

#[derive(Parser)]
#[command(name = "qsensing", version, about = "Quantum sensing simulations from TOML configurations")]
struct Cli {
    /// Suppress the run summary on stdout.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment configuration.
    Run {
        config: PathBuf,
        /// Overrides the seed in the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: config `output`, then $QSENSING_OUT/<name>, then results/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record a timestamp in summary.json.
        #[arg(long)]
        stamp: bool,
    },
    /// List experiment kinds.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", catalog::render());
            ExitCode::SUCCESS
        }
        Command::Run { config, seed, out, stamp } => match run_config(&config, &Overrides { seed, out, stamp }) {
            Ok((dir, bundle)) => {
                if !cli.quiet {
                    for (k, v) in &bundle.metrics {
                        println!("{k} = {v}");
                    }
                    for c in &bundle.checks {
                        println!("check {}: ok ({})", c.name, c.detail);
                    }
                    println!("wrote {}", dir.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("qsensing: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
