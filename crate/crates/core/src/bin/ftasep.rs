use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ftasep::experiments::{
    run, ExperimentError, ExperimentKind, LoadedConfig, RunOptions, EXIT_CONFIG,
};

/// Run one experiment from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "ftasep", version)]
struct Cli {
    /// simulate, ring-exact, invariance-check, limit-table,
    /// critical-absorption, freezing-scan or subcritical-compare
    experiment: ExperimentKind,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ftasep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, ExperimentError> {
    let mut loaded = LoadedConfig::from_path(&cli.config)?;
    if loaded.config.experiment != cli.experiment {
        return Err(ExperimentError::Config {
            line: 1,
            message: format!(
                "config describes `{}` but `{}` was requested",
                loaded.config.experiment, cli.experiment
            ),
        });
    }
    if let Some(seed) = cli.seed {
        loaded.config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        loaded.config.trials = trials;
    }
    if let Some(out) = &cli.out {
        loaded.config.output.dir = out.clone();
    }
    let outcome = run(
        &loaded,
        RunOptions {
            workers: cli.workers,
        },
    )?;
    for check in outcome.manifest.checks.iter().filter(|c| !c.passed) {
        eprintln!("ftasep: check `{}` failed: {}", check.name, check.detail);
    }
    println!("{}", outcome.out_dir.display());
    debug_assert!(outcome.exit_code != EXIT_CONFIG);
    Ok(outcome.exit_code)
}
