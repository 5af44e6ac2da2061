//! Experiment orchestration for the Dynamical CRP: config-driven sweeps,
//! dataset and result persistence, and SVG figures.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]. Jobs run
//! on a rayon pool of `workers` threads and results are collected in grid
//! order, so the row set does not depend on the worker count.

pub mod config;
pub mod mc;
pub mod output;
pub mod seeding;
pub mod slam;
pub mod svg;
pub mod sweep;

use std::path::{Path, PathBuf};

pub use config::{Dynamics, Experiment, ExperimentConfig, Method};
pub use output::ResultRow;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] dcrp::Error),

    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    /// 2 for configuration errors, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Files written by a run, relative to `output_dir`, in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub rows: Vec<ResultRow>,
}

/// Validates `config` and runs its experiment.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Runtime(e.to_string()))?;
    pool.install(|| match config.experiment {
        Experiment::McValidation => mc::run_mc_validation(config),
        Experiment::GaussianSweep | Experiment::VmfSweep => sweep::run_sweep(config),
        Experiment::Slam => slam::run_slam(config),
    })
}

/// Writes the datasets of `config` without running any method.
pub fn generate(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    match config.experiment {
        Experiment::GaussianSweep | Experiment::VmfSweep => sweep::generate_datasets(config),
        Experiment::Slam => slam::generate_environments(config),
        Experiment::McValidation => Err(HarnessError::Config(
            "generate needs a sweep or slam experiment".into(),
        )),
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod book_experiments {}
