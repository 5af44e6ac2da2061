use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{Error, Result};

/// One draw from `vMF(direction, kappa)`, deterministic given `seed`.
pub fn sample_vmf(direction: &[f64], kappa: f64, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_vmf_with(direction, kappa, &mut rng)
}

/// Wood's rejection sampler: draw the cosine `w` to the mean direction, then
/// a uniform direction in the orthogonal complement.
pub fn sample_vmf_with<R: Rng + ?Sized>(
    direction: &[f64],
    kappa: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let d = direction.len();
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if d == 0 || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(
            "vMF direction must be a unit vector".into(),
        ));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "vMF concentration must be >= 0, got {kappa}"
        )));
    }
    if kappa == 0.0 {
        return Ok(uniform_sphere(d, rng));
    }
    if d == 1 {
        // p(+1) = e^k / (e^k + e^-k)
        let p_plus = 1.0 / (1.0 + (-2.0 * kappa).exp());
        let sign = if rng.random::<f64>() < p_plus {
            1.0
        } else {
            -1.0
        };
        return Ok(vec![sign * direction[0]]);
    }

    let m = (d - 1) as f64;
    let b = m / (2.0 * kappa + (4.0 * kappa * kappa + m * m).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + m * (1.0 - x0 * x0).ln();
    let beta = Beta::new(m / 2.0, m / 2.0).expect("positive shape");
    let w = loop {
        let z: f64 = beta.sample(rng);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.random();
        if kappa * w + m * (1.0 - x0 * w).ln() - c >= u.ln() {
            break w.clamp(-1.0, 1.0);
        }
    };

    let mu: Vec<f64> = direction.iter().map(|v| v / norm).collect();
    let tangent = loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let proj: f64 = g.iter().zip(&mu).map(|(a, b)| a * b).sum();
        let v: Vec<f64> = g.iter().zip(&mu).map(|(a, b)| a - proj * b).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            break v.into_iter().map(|x| x / n).collect::<Vec<_>>();
        }
    };
    let s = (1.0 - w * w).max(0.0).sqrt();
    let x: Vec<f64> = mu
        .iter()
        .zip(&tangent)
        .map(|(m, t)| w * m + s * t)
        .collect();
    Ok(normalize(x))
}

pub(crate) fn uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return g.into_iter().map(|x| x / n).collect();
        }
    }
}

fn normalize(x: Vec<f64>) -> Vec<f64> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.into_iter().map(|v| v / n).collect()
}
