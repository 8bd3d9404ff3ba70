use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use frac_orlicz_cli::{run_file, Options};

#[derive(Parser)]
#[command(name = "frac-orlicz", version, about = "Galerkin eigenpairs for nonlocal Orlicz-type operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the mode named in a TOML configuration.
    Solve {
        config: PathBuf,
        /// Override `solver.rng_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Print nothing on success.
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let Command::Solve { config, seed, out, quiet } = Cli::parse().command;
    let opts = Options { seed, out, quiet };
    match run_file(&config, &opts) {
        Ok(outcome) => {
            if !quiet {
                print!("{}", outcome.summary);
                for f in &outcome.files {
                    println!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
