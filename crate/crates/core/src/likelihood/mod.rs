//! Likelihood families and their coordinate-ascent variational updates.
//!
//! Every family exposes the same pair of closed-form steps:
//!
//! * assignment logits: `log q(c_n = l | o_<n) + E_q[log p(o_n | phi_l)]`,
//!   softmaxed by the caller into responsibilities;
//! * parameter update: the optimal `q(phi_l)` given responsibility `pi_l`,
//!   always computed from the cluster's posterior *before* observation `n`.
//!
//! [`ClusterPosterior`] and [`Observation`] dispatch over the three families
//! for the streaming engine.

mod bernoulli;
mod gaussian;
mod vmf;

pub use bernoulli::{bernoulli_assignment_logits, beta_param_update, BetaPosterior};
pub use gaussian::{gaussian_assignment_logits, gaussian_param_update, GaussianPosterior};
pub use vmf::{vmf_assignment_logits, vmf_param_update, VmfPosterior};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prior over cluster parameters plus the known observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PriorSpec {
    /// Means `phi ~ N(0, rho^2 I)`, observations `N(phi, sigma_o^2 I)`.
    Gaussian { rho: f64, sigma_o: f64 },
    /// Per-landmark `Beta(gamma0, beta0)` visibility probabilities.
    Bernoulli { gamma0: f64, beta0: f64 },
    /// Directions `vMF(kappa0)`, observations `exp(phi^T o / sigma_o^2)`.
    Vmf { kappa0: f64, sigma_o: f64 },
}

impl PriorSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            PriorSpec::Gaussian { .. } => "gaussian",
            PriorSpec::Bernoulli { .. } => "bernoulli",
            PriorSpec::Vmf { .. } => "vmf",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PriorSpec::Gaussian { rho, sigma_o } => rho > 0.0 && sigma_o > 0.0,
            PriorSpec::Bernoulli { gamma0, beta0 } => gamma0 > 0.0 && beta0 > 0.0,
            PriorSpec::Vmf { kappa0, sigma_o } => kappa0 >= 0.0 && sigma_o > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "prior scales must be positive: {self:?}"
            )))
        }
    }

    /// Posterior for a cluster that has seen no data yet. Gaussian means and
    /// vMF directions are seeded at `obs`.
    pub fn new_cluster(&self, obs: &Observation) -> Result<ClusterPosterior> {
        match (*self, obs) {
            (PriorSpec::Gaussian { rho, .. }, Observation::Real(o)) => Ok(
                ClusterPosterior::Gaussian(GaussianPosterior::isotropic(o.clone(), rho * rho)?),
            ),
            (PriorSpec::Bernoulli { gamma0, beta0 }, Observation::Binary(x)) => Ok(
                ClusterPosterior::Beta(BetaPosterior::uniform(x.len(), gamma0, beta0)?),
            ),
            (PriorSpec::Vmf { kappa0, .. }, Observation::Real(o)) => {
                Ok(ClusterPosterior::Vmf(VmfPosterior::new(o.clone(), kappa0)?))
            }
            _ => Err(Error::FamilyMismatch {
                expected: self.family_name(),
            }),
        }
    }
}

/// A single observation: a real vector (Gaussian, vMF) or a binary vector
/// (product of Bernoullis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observation {
    Binary(Vec<u8>),
    Real(Vec<f64>),
}

impl Observation {
    pub fn dim(&self) -> usize {
        match self {
            Observation::Binary(x) => x.len(),
            Observation::Real(x) => x.len(),
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Observation::Real(x) => Some(x),
            Observation::Binary(_) => None,
        }
    }

    pub fn as_binary(&self) -> Option<&[u8]> {
        match self {
            Observation::Binary(x) => Some(x),
            Observation::Real(_) => None,
        }
    }

    /// Real-valued copy (binary entries become 0.0 / 1.0).
    pub fn to_real(&self) -> Vec<f64> {
        match self {
            Observation::Real(x) => x.clone(),
            Observation::Binary(x) => x.iter().map(|&b| f64::from(b)).collect(),
        }
    }
}

/// Variational posterior over one cluster's parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ClusterPosterior {
    Gaussian(GaussianPosterior),
    Beta(BetaPosterior),
    Vmf(VmfPosterior),
}

/// Numerically stable softmax. Entries equal to negative infinity get
/// probability zero.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return vec![1.0 / logits.len() as f64; logits.len()];
    }
    let mut out: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = out.iter().sum();
    for v in &mut out {
        *v /= total;
    }
    out
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_pi(pi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&pi) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "responsibility must lie in [0, 1], got {pi}"
        )))
    }
}
