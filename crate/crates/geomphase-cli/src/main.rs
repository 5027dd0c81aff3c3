//! Experiment runner: named deterministic batch jobs emitting CSV/JSON
//! tables. Exit codes: 0 ok, 1 configuration error, 2 runtime error.

mod config;
mod output;
mod registry;
mod run;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use output::OutputDir;
use run::RunError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "geomphase", version, about = "Geometric-phase experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML (or JSON) configuration file.
    Run {
        /// Path to the configuration file.
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for ensemble parallelism (default: logical cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output root directory (overrides config and environment).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// List the available experiments with their required parameters.
    List,
}

const OUTPUT_ENV: &str = "GEOMPHASE_OUTPUT_DIR";

fn resolve_output_root(flag: Option<PathBuf>) -> PathBuf {
    if let Some(dir) = flag {
        return dir;
    }
    if let Ok(dir) = std::env::var(OUTPUT_ENV) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from("geomphase-out")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            println!("{:<22} {:<60} required parameters", "name", "description");
            for e in registry::EXPERIMENTS {
                println!("{:<22} {:<60} {}", e.name, e.description, e.required);
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, seed, threads, output_dir } => {
            if let Some(n) = threads {
                // ignore the error if a global pool already exists
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            match execute(&config, seed, output_dir) {
                Ok(dir) => {
                    println!("wrote {}", dir.display());
                    ExitCode::SUCCESS
                }
                Err(RunError::Config(e)) => {
                    eprintln!("{e}");
                    ExitCode::from(1)
                }
                Err(RunError::Runtime(e)) => {
                    eprintln!("runtime error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

fn execute(
    config_path: &PathBuf,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
) -> Result<PathBuf, RunError> {
    let mut cfg = ExperimentConfig::from_path(config_path).map_err(RunError::Config)?;
    if registry::find(&cfg.experiment).is_none() {
        return Err(RunError::Config(config::ConfigError::Invalid(format!(
            "unknown experiment \"{}\"; see `geomphase list`",
            cfg.experiment
        ))));
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let root = resolve_output_root(output_dir);
    let sub = cfg.output.clone().unwrap_or_else(|| cfg.experiment.clone());
    let dir = root.join(sub);
    let mut out = OutputDir::create(dir.clone())
        .map_err(|e| RunError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    run::run(&cfg, &mut out)?;
    Ok(dir)
}
