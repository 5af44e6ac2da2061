use super::{check_len, check_pi};
use crate::error::{Error, Result};
use crate::special::{vmf_log_normalizer, vmf_mean_length};

/// `q(phi) = vMF(direction, concentration)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VmfPosterior {
    direction: Vec<f64>,
    concentration: f64,
}

impl VmfPosterior {
    /// `direction` is normalized; it must be nonzero.
    pub fn new(direction: Vec<f64>, concentration: f64) -> Result<Self> {
        if !(concentration >= 0.0 && concentration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "vMF concentration must be >= 0, got {concentration}"
            )));
        }
        let norm = l2(&direction);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter(
                "vMF direction must be a nonzero vector".into(),
            ));
        }
        Ok(VmfPosterior {
            direction: direction.iter().map(|v| v / norm).collect(),
            concentration,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn concentration(&self) -> f64 {
        self.concentration
    }

    /// `A_D(kappa)`, so that `E[phi] = A_D(kappa) mu`.
    pub fn mean_length(&self) -> f64 {
        vmf_mean_length(self.dim(), self.concentration)
    }

    /// `A_D(kappa) mu^T o / sigma_o^2`.
    pub fn expected_log_lik_kernel(&self, obs: &[f64], sigma_o: f64) -> f64 {
        self.mean_length() * dot(&self.direction, obs) / (sigma_o * sigma_o)
    }

    /// Full `E_q[log p(o | phi)]` with observation concentration `1/sigma_o^2`.
    pub fn expected_log_lik(&self, obs: &[f64], sigma_o: f64) -> f64 {
        vmf_log_normalizer(self.dim(), 1.0 / (sigma_o * sigma_o))
            + self.expected_log_lik_kernel(obs, sigma_o)
    }

    /// `E_self[log vMF(phi; prev)]`.
    pub fn expected_log_density_under(&self, prev: &VmfPosterior) -> f64 {
        vmf_log_normalizer(prev.dim(), prev.concentration)
            + prev.concentration * self.mean_length() * dot(&prev.direction, &self.direction)
    }

    pub fn entropy(&self) -> f64 {
        -vmf_log_normalizer(self.dim(), self.concentration)
            - self.concentration * self.mean_length()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Unnormalized log responsibilities
/// `log q(c = l) + A_D(kappa_l) mu_l^T o / sigma_o^2`.
pub fn vmf_assignment_logits(
    obs: &[f64],
    posteriors: &[VmfPosterior],
    prior_log_probs: &[f64],
    sigma_o: f64,
) -> Result<Vec<f64>> {
    check_len(posteriors.len(), prior_log_probs.len())?;
    posteriors
        .iter()
        .zip(prior_log_probs)
        .map(|(post, &lp)| {
            check_len(post.dim(), obs.len())?;
            Ok(lp + post.expected_log_lik_kernel(obs, sigma_o))
        })
        .collect()
}

/// `RHS = kappa mu + (pi / sigma_o^2) o`; `kappa' = |RHS|`, `mu' = RHS / |RHS|`.
/// A vanishing RHS keeps the previous direction with zero concentration.
pub fn vmf_param_update(
    obs: &[f64],
    pi: f64,
    prev: &VmfPosterior,
    sigma_o: f64,
) -> Result<VmfPosterior> {
    check_pi(pi)?;
    check_len(prev.dim(), obs.len())?;
    if pi == 0.0 {
        return Ok(prev.clone());
    }
    let c = pi / (sigma_o * sigma_o);
    let rhs: Vec<f64> = prev
        .direction
        .iter()
        .zip(obs)
        .map(|(m, o)| prev.concentration * m + c * o)
        .collect();
    let norm = l2(&rhs);
    if norm < 1e-12 {
        return Ok(VmfPosterior {
            direction: prev.direction.clone(),
            concentration: 0.0,
        });
    }
    Ok(VmfPosterior {
        direction: rhs.iter().map(|v| v / norm).collect(),
        concentration: norm,
    })
}
