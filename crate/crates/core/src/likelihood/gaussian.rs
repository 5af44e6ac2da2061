use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

use super::{check_len, check_pi};
use crate::error::{Error, Result};

/// `q(phi) = N(mean, covariance)` for one cluster mean.
///
/// The precision is cached because every update within an observation
/// starts from the same previous posterior. Isotropic covariances, which is
/// all the isotropic prior and update ever produce, take a scalar fast path.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPosterior {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    precision: DMatrix<f64>,
    ln_det_cov: f64,
    iso_variance: Option<f64>,
}

impl GaussianPosterior {
    pub fn new(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: covariance.nrows(),
            });
        }
        for i in 0..d {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-10 {
                    return Err(Error::SingularCovariance);
                }
            }
        }
        let chol = covariance
            .clone()
            .cholesky()
            .ok_or(Error::SingularCovariance)?;
        let ln_det_cov = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let precision = chol.inverse();
        Ok(GaussianPosterior {
            mean: DVector::from_vec(mean),
            covariance,
            precision,
            ln_det_cov,
            iso_variance: None,
        })
    }

    pub fn isotropic(mean: Vec<f64>, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::SingularCovariance);
        }
        let d = mean.len();
        Ok(GaussianPosterior {
            mean: DVector::from_vec(mean),
            covariance: DMatrix::identity(d, d) * variance,
            precision: DMatrix::identity(d, d) / variance,
            ln_det_cov: d as f64 * variance.ln(),
            iso_variance: Some(variance),
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn trace_covariance(&self) -> f64 {
        match self.iso_variance {
            Some(v) => v * self.dim() as f64,
            None => self.covariance.trace(),
        }
    }

    /// `E_q[log N(o; phi, sigma_o^2 I)]` without the `-D/2 log(2 pi sigma^2)`
    /// constant: `(2 o^T mu - o^T o - Tr[Sigma + mu mu^T]) / (2 sigma^2)`.
    pub fn expected_log_lik_kernel(&self, obs: &[f64], sigma_o: f64) -> f64 {
        let s2 = sigma_o * sigma_o;
        let mut oo = 0.0;
        let mut om = 0.0;
        let mut mm = 0.0;
        for (o, m) in obs.iter().zip(self.mean.iter()) {
            oo += o * o;
            om += o * m;
            mm += m * m;
        }
        om / s2 - oo / (2.0 * s2) - (self.trace_covariance() + mm) / (2.0 * s2)
    }

    /// Full `E_q[log N(o; phi, sigma_o^2 I)]`.
    pub fn expected_log_lik(&self, obs: &[f64], sigma_o: f64) -> f64 {
        let d = self.dim() as f64;
        self.expected_log_lik_kernel(obs, sigma_o) - 0.5 * d * (2.0 * PI * sigma_o * sigma_o).ln()
    }

    /// `E_self[log N(phi; prev.mean, prev.covariance)]`.
    pub fn expected_log_density_under(&self, prev: &GaussianPosterior) -> f64 {
        let d = self.dim() as f64;
        let diff = &self.mean - &prev.mean;
        let (quad, trace) = match prev.iso_variance {
            Some(v) => (diff.norm_squared() / v, self.trace_covariance() / v),
            None => (
                (diff.transpose() * &prev.precision * &diff)[(0, 0)],
                (&prev.precision * &self.covariance).trace(),
            ),
        };
        -0.5 * d * (2.0 * PI).ln() - 0.5 * prev.ln_det_cov - 0.5 * (quad + trace)
    }

    pub fn entropy(&self) -> f64 {
        let d = self.dim() as f64;
        0.5 * d * (1.0 + (2.0 * PI).ln()) + 0.5 * self.ln_det_cov
    }
}

/// Unnormalized log responsibilities
/// `log q(c = l) - o^T o / 2s^2 + o^T mu_l / s^2 - Tr[Sigma_l + mu_l mu_l^T] / 2s^2`.
pub fn gaussian_assignment_logits(
    obs: &[f64],
    posteriors: &[GaussianPosterior],
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

/// `Sigma' = (Sigma^-1 + (pi / s^2) I)^-1`,
/// `mu' = Sigma' (Sigma^-1 mu + (pi / s^2) o)`.
pub fn gaussian_param_update(
    obs: &[f64],
    pi: f64,
    prev: &GaussianPosterior,
    sigma_o: f64,
) -> Result<GaussianPosterior> {
    check_pi(pi)?;
    check_len(prev.dim(), obs.len())?;
    if pi == 0.0 {
        return Ok(prev.clone());
    }
    let c = pi / (sigma_o * sigma_o);
    let o = DVector::from_column_slice(obs);
    if let Some(v) = prev.iso_variance {
        let new_var = 1.0 / (1.0 / v + c);
        let mean = (&prev.mean / v + &o * c) * new_var;
        return GaussianPosterior::isotropic(mean.as_slice().to_vec(), new_var);
    }
    let d = prev.dim();
    let precision = &prev.precision + DMatrix::identity(d, d) * c;
    let chol = precision
        .clone()
        .cholesky()
        .ok_or(Error::SingularCovariance)?;
    let covariance = chol.inverse();
    let rhs = &prev.precision * &prev.mean + &o * c;
    let mean = chol.solve(&rhs);
    let ln_det_cov = -2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    // symmetrize away round-off from the inverse
    let covariance = (&covariance + covariance.transpose()) * 0.5;
    Ok(GaussianPosterior {
        mean,
        covariance,
        precision,
        ln_det_cov,
        iso_variance: None,
    })
}
