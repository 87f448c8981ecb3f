use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use resonance_cli::commands;
use resonance_cli::config::Config;
use resonance_cli::error::CliError;

#[derive(Parser)]
#[command(name = "resonance", version, about = "Resonant kicked rotor and kicked top experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve rotors; write moments.csv and entropy.csv.
    Simulate(Common),
    /// Closed-form regimes, parameters, entropy laws and predicted curves.
    Predict(Common),
    /// Symmetry classes and regimes only.
    Classify(Common),
    /// Agreement times of detuned runs against the exact resonance.
    DetuneScan(Common),
    /// Evolve kicked tops.
    TopSimulate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Overrides predictor.seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, action): (&Common, fn(&Config, &std::path::Path) -> Result<_, CliError>) = match &cli.command {
        Command::Simulate(c) => (c, commands::simulate),
        Command::Predict(c) => (c, commands::predict),
        Command::Classify(c) => (c, commands::classify),
        Command::DetuneScan(c) => (c, commands::detune_scan),
        Command::TopSimulate(c) => (c, commands::top_simulate),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let mut config = Config::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        config.predictor.seed = seed;
    }
    let out = action(&config, &common.out_dir)?;
    let manifest = out.finish()?;
    if !common.quiet {
        println!("{}", manifest.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
