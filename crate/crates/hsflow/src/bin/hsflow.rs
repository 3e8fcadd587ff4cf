use clap::{Parser, Subcommand};
use hsflow::cli::commands;
use std::path::PathBuf;

/// Simulate the hypersymplectic flow of simple type on the 4-torus and
/// verify its a-priori estimates. Set HSFLOW_LOG=quiet|info|debug to
/// control diagnostics on stderr.
#[derive(Parser)]
#[command(name = "hsflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured flow and write CSVs, verdicts, and a manifest.
    Run {
        /// TOML run config
        #[arg(long)]
        config: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the identity/property suite and print measured errors.
    Check {
        /// Grid sizes, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [32usize, 64])]
        n: Vec<usize>,
    },
    /// Run an amplitude/mode sweep and aggregate a summary CSV.
    Sweep {
        /// TOML sweep config
        #[arg(long)]
        config: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out } => commands::cmd_run(&config, &out),
        Command::Check { n } => commands::cmd_check(&n),
        Command::Sweep { config, out } => commands::cmd_sweep(&config, &out),
    };
    std::process::exit(code);
}
