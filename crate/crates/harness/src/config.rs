//! Experiment configuration: which experiment, the parameter grid, the
//! methods to run and where to write.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use dcrp::TimeKernel;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    McValidation,
    GaussianSweep,
    VmfSweep,
    Slam,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::McValidation => "mc-validation",
            Experiment::GaussianSweep => "gaussian-sweep",
            Experiment::VmfSweep => "vmf-sweep",
            Experiment::Slam => "slam",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [
            Experiment::McValidation,
            Experiment::GaussianSweep,
            Experiment::VmfSweep,
            Experiment::Slam,
        ]
        .into_iter()
        .find(|e| e.name() == name)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dcrp,
    Rcrp,
    KmeansOnline,
    KmeansBatch,
    DpmeansOnline,
    DpmeansBatch,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Dcrp,
        Method::Rcrp,
        Method::KmeansOnline,
        Method::KmeansBatch,
        Method::DpmeansOnline,
        Method::DpmeansBatch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dcrp => "dcrp",
            Method::Rcrp => "rcrp",
            Method::KmeansOnline => "kmeans-online",
            Method::KmeansBatch => "kmeans-batch",
            Method::DpmeansOnline => "dpmeans-online",
            Method::DpmeansBatch => "dpmeans-batch",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A grid entry for the dynamics axis: a bare kernel name, resolved with the
/// experiment's default time constants, or a fully specified kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dynamics {
    Named(DynamicsName),
    Kernel(TimeKernel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DynamicsName {
    Step,
    Exponential,
    Cosine,
    Hyperbolic,
}

impl Dynamics {
    pub fn resolve(&self, defaults: &KernelDefaults) -> Result<TimeKernel, HarnessError> {
        let kernel = match *self {
            Dynamics::Kernel(k) => k,
            Dynamics::Named(DynamicsName::Step) => TimeKernel::Step,
            Dynamics::Named(DynamicsName::Exponential) => {
                TimeKernel::Exponential { tau: defaults.tau }
            }
            Dynamics::Named(DynamicsName::Cosine) => TimeKernel::Cosine {
                omega: defaults.omega,
            },
            Dynamics::Named(DynamicsName::Hyperbolic) => TimeKernel::Hyperbolic {
                scale: defaults.scale,
            },
        };
        kernel
            .validate()
            .map_err(|e| HarnessError::Config(format!("dynamics {self:?}: {e}")))?;
        Ok(kernel)
    }
}

/// Time constants for kernels given by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelDefaults {
    pub tau: f64,
    pub omega: f64,
    pub scale: f64,
}

impl KernelDefaults {
    /// Unit constants: `exp(-d)`, `cos(d)`, `1/(1+d)`.
    pub fn unit() -> Self {
        KernelDefaults {
            tau: 1.0,
            omega: 1.0,
            scale: 1.0,
        }
    }

    /// Slower constants for 1000-step streams.
    pub fn stream() -> Self {
        KernelDefaults {
            tau: 10.0,
            omega: 0.1,
            scale: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub alpha: Vec<f64>,
    #[serde(default = "one")]
    pub snr: Vec<f64>,
    #[serde(default = "one_dim")]
    pub dim: Vec<usize>,
    pub dynamics: Vec<Dynamics>,
    pub seeds: Vec<u64>,
}

fn one() -> Vec<f64> {
    vec![1.0]
}

fn one_dim() -> Vec<usize> {
    vec![2]
}

/// Settings of the SLAM experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlamSettings {
    pub num_rooms: usize,
    pub landmarks_per_room: (usize, usize),
    pub hallway_width: f64,
    pub view_radius: f64,
    pub gamma0: f64,
    pub beta0: f64,
}

impl Default for SlamSettings {
    fn default() -> Self {
        SlamSettings {
            num_rooms: 4,
            landmarks_per_room: (6, 10),
            hallway_width: 2.0,
            view_radius: 8.0,
            gamma0: 0.5,
            beta0: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: Grid,
    pub methods: Vec<Method>,
    pub output_dir: PathBuf,
    #[serde(default = "one_worker")]
    pub workers: usize,
    #[serde(default = "default_n_obs")]
    pub n_obs: usize,
    /// Monte Carlo sample counts for `mc-validation`.
    #[serde(default = "default_mc_samples")]
    pub mc_samples: Vec<usize>,
    /// Customers per Monte Carlo path for `mc-validation`.
    #[serde(default = "default_mc_steps")]
    pub mc_steps: usize,
    #[serde(default)]
    pub kernel_defaults: Option<KernelDefaults>,
    /// DP-means threshold; the data-driven default when absent.
    #[serde(default)]
    pub dpmeans_lambda: Option<f64>,
    #[serde(default)]
    pub slam: SlamSettings,
    /// Write wall-clock `runtime_ms`. Off gives byte-identical reruns.
    #[serde(default = "yes")]
    pub record_runtime: bool,
}

fn one_worker() -> usize {
    1
}

fn default_n_obs() -> usize {
    1000
}

fn default_mc_samples() -> Vec<usize> {
    vec![50, 500, 5000]
}

fn default_mc_steps() -> usize {
    50
}

fn yes() -> bool {
    true
}

pub const SWEEP_ALPHAS: [f64; 4] = [1.1, 10.78, 15.37, 30.91];

fn all_dynamics() -> Vec<Dynamics> {
    [
        DynamicsName::Step,
        DynamicsName::Exponential,
        DynamicsName::Cosine,
        DynamicsName::Hyperbolic,
    ]
    .into_iter()
    .map(Dynamics::Named)
    .collect()
}

impl ExperimentConfig {
    /// Desk-scale default for an experiment.
    pub fn smoke(experiment: Experiment) -> Self {
        let (grid, methods) = match experiment {
            Experiment::McValidation => (
                Grid {
                    alpha: SWEEP_ALPHAS.to_vec(),
                    snr: one(),
                    dim: one_dim(),
                    dynamics: all_dynamics(),
                    seeds: vec![0],
                },
                vec![Method::Dcrp],
            ),
            Experiment::GaussianSweep => (
                Grid {
                    alpha: vec![1.1, 10.78],
                    snr: vec![10.0],
                    dim: vec![2],
                    dynamics: vec![
                        Dynamics::Named(DynamicsName::Step),
                        Dynamics::Named(DynamicsName::Exponential),
                    ],
                    seeds: vec![0, 1],
                },
                Method::ALL.to_vec(),
            ),
            Experiment::VmfSweep => (
                Grid {
                    alpha: vec![1.1],
                    snr: vec![50.0],
                    dim: vec![3],
                    dynamics: vec![Dynamics::Named(DynamicsName::Step)],
                    seeds: vec![0, 1],
                },
                vec![Method::Dcrp, Method::Rcrp],
            ),
            Experiment::Slam => (
                Grid {
                    alpha: vec![1.0],
                    snr: one(),
                    dim: one_dim(),
                    dynamics: vec![Dynamics::Named(DynamicsName::Exponential)],
                    seeds: (0..5).collect(),
                },
                vec![Method::Dcrp],
            ),
        };
        ExperimentConfig {
            experiment,
            grid,
            methods,
            output_dir: PathBuf::from("results"),
            workers: 1,
            n_obs: default_n_obs(),
            mc_samples: default_mc_samples(),
            mc_steps: default_mc_steps(),
            kernel_defaults: None,
            dpmeans_lambda: None,
            slam: SlamSettings::default(),
            record_runtime: true,
        }
    }

    /// The full sweep grid: 4 alphas x 3 SNRs x 3 dims x 4 dynamics x 25
    /// seeds = 3600 datasets.
    pub fn full(experiment: Experiment) -> Self {
        let mut cfg = Self::smoke(experiment);
        match experiment {
            Experiment::GaussianSweep | Experiment::VmfSweep => {
                cfg.grid = Grid {
                    alpha: SWEEP_ALPHAS.to_vec(),
                    snr: vec![1.0, 3.0, 10.0],
                    dim: vec![2, 8, 32],
                    dynamics: all_dynamics(),
                    seeds: (0..25).collect(),
                };
            }
            Experiment::Slam => cfg.grid.seeds = (0..25).collect(),
            Experiment::McValidation => {}
        }
        cfg
    }

    pub fn kernel_defaults(&self) -> KernelDefaults {
        self.kernel_defaults.unwrap_or(match self.experiment {
            Experiment::McValidation => KernelDefaults::unit(),
            _ => KernelDefaults::stream(),
        })
    }

    pub fn kernels(&self) -> Result<Vec<TimeKernel>, HarnessError> {
        let defaults = self.kernel_defaults();
        self.grid
            .dynamics
            .iter()
            .map(|d| d.resolve(&defaults))
            .collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        let g = &self.grid;
        if g.alpha.is_empty()
            || g.snr.is_empty()
            || g.dim.is_empty()
            || g.dynamics.is_empty()
            || g.seeds.is_empty()
        {
            return bad("every grid axis needs at least one value".into());
        }
        if let Some(a) = g.alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return bad(format!("alpha must be > 0, got {a}"));
        }
        if let Some(s) = g.snr.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return bad(format!("snr must be > 0, got {s}"));
        }
        if g.dim.contains(&0) {
            return bad("dim must be >= 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be >= 1".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        self.kernels()?;
        match self.experiment {
            Experiment::VmfSweep | Experiment::Slam => {
                if let Some(m) = self
                    .methods
                    .iter()
                    .find(|m| !matches!(m, Method::Dcrp | Method::Rcrp))
                {
                    return bad(format!(
                        "method {m} is not available for {}; only dcrp and rcrp are",
                        self.experiment
                    ));
                }
            }
            Experiment::McValidation => {
                if self.mc_samples.is_empty() || self.mc_samples.contains(&0) {
                    return bad("mc_samples must be nonempty and positive".into());
                }
                if self.mc_steps == 0 {
                    return bad("mc_steps must be >= 1".into());
                }
            }
            Experiment::GaussianSweep => {}
        }
        if matches!(
            self.experiment,
            Experiment::GaussianSweep | Experiment::VmfSweep
        ) && self.n_obs == 0
        {
            return bad("n_obs must be >= 1".into());
        }
        if let Some(l) = self.dpmeans_lambda {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("dpmeans_lambda must be > 0, got {l}"));
            }
        }
        let s = &self.slam;
        if s.num_rooms < 2
            || s.landmarks_per_room.0 > s.landmarks_per_room.1
            || !(s.view_radius > 0.0)
            || !(s.gamma0 > 0.0)
            || !(s.beta0 > 0.0)
        {
            return bad("invalid slam settings".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
