use super::{check_len, check_pi};
use crate::error::{Error, Result};
use crate::special::{digamma, ln_gamma};

/// Independent `Beta(gamma_l, beta_l)` posteriors over per-landmark
/// visibility probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaPosterior {
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

impl BetaPosterior {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        check_len(gamma.len(), beta.len())?;
        if gamma.iter().chain(&beta).any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameter(
                "beta posterior parameters must be positive".into(),
            ));
        }
        Ok(BetaPosterior { gamma, beta })
    }

    pub fn uniform(len: usize, gamma0: f64, beta0: f64) -> Result<Self> {
        Self::new(vec![gamma0; len], vec![beta0; len])
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `sum_l x (psi(g) - psi(g + b)) + (1 - x) (psi(b) - psi(g + b))`.
    pub fn expected_log_lik(&self, obs: &[u8]) -> f64 {
        obs.iter()
            .zip(self.gamma.iter().zip(&self.beta))
            .map(|(&x, (&g, &b))| {
                let total = digamma(g + b);
                if x == 1 {
                    digamma(g) - total
                } else {
                    digamma(b) - total
                }
            })
            .sum()
    }

    /// `E_self[log prod_l Beta(phi_l; prev.gamma_l, prev.beta_l)]`.
    pub fn expected_log_density_under(&self, prev: &BetaPosterior) -> f64 {
        self.gamma
            .iter()
            .zip(&self.beta)
            .zip(prev.gamma.iter().zip(&prev.beta))
            .map(|((&g, &b), (&gp, &bp))| {
                let total = digamma(g + b);
                (gp - 1.0) * (digamma(g) - total) + (bp - 1.0) * (digamma(b) - total)
                    - ln_beta(gp, bp)
            })
            .sum()
    }

    pub fn entropy(&self) -> f64 {
        self.gamma
            .iter()
            .zip(&self.beta)
            .map(|(&g, &b)| {
                ln_beta(g, b) - (g - 1.0) * digamma(g) - (b - 1.0) * digamma(b)
                    + (g + b - 2.0) * digamma(g + b)
            })
            .sum()
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn check_binary(obs: &[u8]) -> Result<()> {
    if obs.iter().all(|&x| x <= 1) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "binary observation entries must be 0 or 1".into(),
        ))
    }
}

/// Unnormalized log responsibilities for a binary observation.
pub fn bernoulli_assignment_logits(
    obs: &[u8],
    posteriors: &[BetaPosterior],
    prior_log_probs: &[f64],
) -> Result<Vec<f64>> {
    check_len(posteriors.len(), prior_log_probs.len())?;
    check_binary(obs)?;
    posteriors
        .iter()
        .zip(prior_log_probs)
        .map(|(post, &lp)| {
            check_len(post.dim(), obs.len())?;
            Ok(lp + post.expected_log_lik(obs))
        })
        .collect()
}

/// `gamma' = pi x + gamma`, `beta' = pi (1 - x) + beta`.
pub fn beta_param_update(obs: &[u8], pi: f64, prev: &BetaPosterior) -> Result<BetaPosterior> {
    check_pi(pi)?;
    check_len(prev.dim(), obs.len())?;
    check_binary(obs)?;
    let mut gamma = prev.gamma.clone();
    let mut beta = prev.beta.clone();
    for (l, &x) in obs.iter().enumerate() {
        let x = f64::from(x);
        gamma[l] += pi * x;
        beta[l] += pi * (1.0 - x);
    }
    Ok(BetaPosterior { gamma, beta })
}
