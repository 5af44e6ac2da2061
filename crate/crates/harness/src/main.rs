use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dcrp_harness::{Experiment, ExperimentConfig, HarnessError, RunSummary};

#[derive(Parser)]
#[command(name = "dcrp", version, about = "Dynamical CRP experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic marginals against Monte Carlo estimates.
    McValidate(Common),
    /// Gaussian or vMF clustering sweep.
    Sweep(Common),
    /// Topological mapping on gridworld trajectories.
    Slam(Common),
    /// Write datasets only.
    Generate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run a single seed instead of the grid's seeds.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Use the full grid instead of the smoke grid.
    #[arg(long)]
    full: bool,
    /// Experiment when no config is given: gaussian-sweep or vmf-sweep for
    /// `sweep`, any sweep or slam for `generate`.
    #[arg(long)]
    experiment: Option<String>,
}

fn load(
    default: Experiment,
    allowed: &[Experiment],
    args: &Common,
) -> Result<ExperimentConfig, HarnessError> {
    let requested = match &args.experiment {
        Some(name) => Some(
            Experiment::parse(name)
                .ok_or_else(|| HarnessError::Config(format!("unknown experiment {name}")))?,
        ),
        None => None,
    };
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            if requested.is_some_and(|r| r != cfg.experiment) {
                return Err(HarnessError::Config(
                    "--experiment disagrees with the config file".into(),
                ));
            }
            if args.full {
                let full = ExperimentConfig::full(cfg.experiment);
                ExperimentConfig {
                    grid: full.grid,
                    ..cfg
                }
            } else {
                cfg
            }
        }
        None => {
            let e = requested.unwrap_or(default);
            if args.full {
                ExperimentConfig::full(e)
            } else {
                ExperimentConfig::smoke(e)
            }
        }
    };
    if !allowed.contains(&cfg.experiment) {
        return Err(HarnessError::Config(format!(
            "experiment {} is not valid for this subcommand",
            cfg.experiment
        )));
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.grid.seeds = vec![seed];
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<RunSummary, HarnessError> {
    use Experiment::*;
    match cli.command {
        Command::McValidate(a) => dcrp_harness::run(&load(McValidation, &[McValidation], &a)?),
        Command::Sweep(a) => {
            dcrp_harness::run(&load(GaussianSweep, &[GaussianSweep, VmfSweep], &a)?)
        }
        Command::Slam(a) => dcrp_harness::run(&load(Slam, &[Slam], &a)?),
        Command::Generate(a) => {
            dcrp_harness::generate(&load(GaussianSweep, &[GaussianSweep, VmfSweep, Slam], &a)?)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(summary) => {
            eprintln!(
                "wrote {} files, {} result rows",
                summary.files.len(),
                summary.rows.len()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
