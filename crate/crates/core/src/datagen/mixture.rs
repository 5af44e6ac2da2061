use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::vmf_sampler::{sample_vmf_with, uniform_sphere};
use super::DatasetRecord;
use crate::error::{Error, Result};
use crate::likelihood::Observation;
use crate::process::{sample_path_with, ProcessParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixtureFamily {
    Gaussian,
    Vmf,
}

/// A Dynamical-CRP mixture dataset.
///
/// Gaussian: means `phi_k ~ N(0, rho^2 I)`, observations `N(phi_k, sigma_o^2 I)`.
/// vMF: uniform directions, observations `vMF(phi_k, kappa_likelihood)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub family: MixtureFamily,
    pub dim: usize,
    pub rho: f64,
    pub sigma_o: f64,
    pub kappa_likelihood: f64,
    #[serde(default = "default_n_obs")]
    pub n_obs: usize,
    pub process: ProcessParams,
    pub seed: u64,
}

fn default_n_obs() -> usize {
    1000
}

impl MixtureSpec {
    /// Gaussian mixture with `rho = snr` and unit observation noise.
    pub fn gaussian(dim: usize, snr: f64, process: ProcessParams, seed: u64) -> Self {
        MixtureSpec {
            family: MixtureFamily::Gaussian,
            dim,
            rho: snr,
            sigma_o: 1.0,
            kappa_likelihood: 1.0,
            n_obs: default_n_obs(),
            process,
            seed,
        }
    }

    pub fn vmf(dim: usize, kappa_likelihood: f64, process: ProcessParams, seed: u64) -> Self {
        MixtureSpec {
            family: MixtureFamily::Vmf,
            dim,
            rho: 1.0,
            sigma_o: 1.0,
            kappa_likelihood,
            n_obs: default_n_obs(),
            process,
            seed,
        }
    }

    pub fn snr(&self) -> f64 {
        match self.family {
            MixtureFamily::Gaussian => self.rho / self.sigma_o,
            MixtureFamily::Vmf => self.kappa_likelihood,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.process.validate()?;
        if self.dim == 0 {
            return Err(Error::InvalidParameter("mixture dim must be >= 1".into()));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )))
            }
        };
        match self.family {
            MixtureFamily::Gaussian => {
                positive("rho", self.rho)?;
                positive("sigma_o", self.sigma_o)
            }
            MixtureFamily::Vmf => positive("kappa_likelihood", self.kappa_likelihood),
        }
    }
}

/// Draws a dataset at times `t_n = n`, `n = 1..=n_obs`.
pub fn sample_mixture(spec: &MixtureSpec) -> Result<Vec<DatasetRecord>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let times: Vec<f64> = (1..=spec.n_obs).map(|n| n as f64).collect();
    let path = sample_path_with(&spec.process, &times, &mut rng)?;

    let k = path.num_clusters();
    let params: Vec<Vec<f64>> = (0..k)
        .map(|_| match spec.family {
            MixtureFamily::Gaussian => (0..spec.dim)
                .map(|_| spec.rho * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            MixtureFamily::Vmf => uniform_sphere(spec.dim, &mut rng),
        })
        .collect();

    path.assignments
        .iter()
        .zip(&times)
        .enumerate()
        .map(|(index, (&label, &time))| {
            let phi = &params[label - 1];
            let obs = match spec.family {
                MixtureFamily::Gaussian => phi
                    .iter()
                    .map(|m| m + spec.sigma_o * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
                MixtureFamily::Vmf => sample_vmf_with(phi, spec.kappa_likelihood, &mut rng)?,
            };
            Ok(DatasetRecord {
                index,
                time,
                observation: Observation::Real(obs),
                true_cluster: label,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::TimeKernel;

    fn step(alpha: f64) -> ProcessParams {
        ProcessParams::new(alpha, TimeKernel::Step).unwrap()
    }

    #[test]
    fn tiny_alpha_gives_one_cluster() {
        let mut spec = MixtureSpec::gaussian(2, 3.0, step(1e-300), 1);
        spec.n_obs = 200;
        let data = sample_mixture(&spec).unwrap();
        assert!(data.iter().all(|r| r.true_cluster == 1));
    }

    #[test]
    fn noiseless_limit() {
        let mut spec = MixtureSpec::gaussian(3, 1.0, step(2.0), 4);
        spec.sigma_o = 1e-9;
        spec.n_obs = 300;
        let data = sample_mixture(&spec).unwrap();
        let mut first: Vec<Option<Vec<f64>>> = vec![None; 400];
        for r in &data {
            let o = r.observation.as_real().unwrap().to_vec();
            match &first[r.true_cluster] {
                None => first[r.true_cluster] = Some(o),
                Some(f) => {
                    for (a, b) in f.iter().zip(&o) {
                        assert!((a - b).abs() < 2e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_times_and_determinism() {
        let spec = MixtureSpec::vmf(3, 50.0, step(1.1), 7);
        let a = sample_mixture(&spec).unwrap();
        assert_eq!(a, sample_mixture(&spec).unwrap());
        assert_eq!(a.len(), 1000);
        assert!(a
            .iter()
            .enumerate()
            .all(|(i, r)| r.time == (i + 1) as f64 && r.index == i));
    }
}
