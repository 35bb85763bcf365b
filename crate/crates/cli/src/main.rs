use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod manifest;

use error::CliError;

#[derive(Parser)]
#[command(name = "flashcap", version, about = "NAND-flash capacity, voltage allocation and wear estimation")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Common {
    /// Device and policy configuration (`name = value` lines); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Where to write the run manifest; next to the first output file by default, stderr if there is none.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity at the retention horizon against P/E cycles, for both policies.
    CapacitySweep {
        #[arg(long)]
        out: PathBuf,
    },
    /// Cycles until capacity falls below the threshold. Runs both policies
    /// unless `mode` is set in the configuration.
    Lifetime {
        /// Directory for the per-policy trajectory CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the wear state behind a read histogram.
    Estimate(commands::EstimateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::CapacitySweep { out } => commands::capacity_sweep(&cli.common, &out),
        Command::Lifetime { out } => commands::lifetime(&cli.common, out.as_deref()),
        Command::Estimate(args) => commands::estimate(&cli.common, &args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

impl Common {
    pub fn manifest_path(&self) -> Option<&std::path::Path> {
        self.manifest.as_deref()
    }
}

pub type CliResult<T> = Result<T, CliError>;
