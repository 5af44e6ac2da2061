//! Time-evolving partition priors and streaming variational clustering.

pub mod baselines;
pub mod datagen;
pub mod error;
pub mod infer;
pub mod kernel;
pub mod likelihood;
pub mod metrics;
pub mod process;
pub mod special;

pub use error::{Error, Result};
pub use infer::{fit_stream, InferenceConfig, StreamFit, StreamingPosterior};
pub use kernel::{evaluate_kernel, ClusterMassState, TimeKernel};
pub use process::{MarginalState, ProcessParams, SamplePath};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    pub mod kernels {}
    #[doc = include_str!("../../../book/src/process.md")]
    pub mod process {}
    #[doc = include_str!("../../../book/src/likelihoods.md")]
    pub mod likelihoods {}
    #[doc = include_str!("../../../book/src/inference.md")]
    pub mod inference {}
    #[doc = include_str!("../../../book/src/data.md")]
    pub mod data {}
}
