//! Special functions needed by the conjugate updates.
//!
//! `digamma` and `ln_gamma` come from `statrs`. The modified Bessel ratio
//! `I_{nu+1}(x) / I_nu(x)` and `ln I_nu(x)` are evaluated here: a continued
//! fraction (ratio) and a rescaled power series (log) for moderate `x`, the
//! Hankel large-argument expansion once `x` dominates `nu^2`.

pub use statrs::function::gamma::{digamma, ln_gamma};

const HANKEL_MIN_X: f64 = 500.0;

fn use_hankel(nu: f64, x: f64) -> bool {
    x > HANKEL_MIN_X && x > 8.0 * (nu + 1.0) * (nu + 1.0)
}

/// Hankel series `sum_k (-1)^k a_k(nu) / x^k` with
/// `a_k = prod_{j=1..k} (4 nu^2 - (2j - 1)^2) / (k! 8^k)`.
fn hankel_sum(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `A(nu, x) = I_{nu+1}(x) / I_nu(x)`, in `[0, 1)`, with `A(nu, 0) = 0`.
///
/// For the von Mises–Fisher distribution on the sphere in `D` dimensions the
/// mean resultant length is `A(D/2 - 1, kappa)`.
pub fn bessel_ratio(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if use_hankel(nu, x) {
        return hankel_sum(nu + 1.0, x) / hankel_sum(nu, x);
    }
    // r_nu = 1 / (2 (nu + 1) / x + r_{nu+1}); modified Lentz on the tail.
    const TINY: f64 = 1e-300;
    let b = |j: usize| 2.0 * (nu + j as f64) / x;
    let mut f = b(1);
    if f == 0.0 {
        f = TINY;
    }
    let mut c = f;
    let mut d = 0.0;
    for j in 2..200_000 {
        let bj = b(j);
        d = bj + d;
        if d == 0.0 {
            d = TINY;
        }
        c = bj + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `ln I_nu(x)` for `nu >= 0`, `x >= 0`.
pub fn ln_bessel_i(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if use_hankel(nu, x) {
        return x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + hankel_sum(nu, x).ln();
    }
    // sum_k (x/2)^(2k+nu) / (k! Gamma(k + nu + 1)), relative to the k = 0 term
    let log_first = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0);
    let q = 0.25 * x * x;
    let mut offset = 0.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let peak = 0.5 * x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if sum > 1e200 {
            sum *= 1e-200;
            term *= 1e-200;
            offset += 200.0 * std::f64::consts::LN_10;
        }
        if k > peak && term < 1e-17 * sum {
            break;
        }
    }
    log_first + offset + sum.ln()
}

/// `A_D(kappa)`: mean resultant length of a vMF in `dim` dimensions.
pub fn vmf_mean_length(dim: usize, kappa: f64) -> f64 {
    bessel_ratio(dim as f64 / 2.0 - 1.0, kappa)
}

/// Log normalizer `ln C_D(kappa)` of the vMF density
/// `C_D(kappa) exp(kappa mu^T x)` with respect to surface measure.
pub fn vmf_log_normalizer(dim: usize, kappa: f64) -> f64 {
    let d = dim as f64;
    let nu = d / 2.0 - 1.0;
    if kappa < 1e-8 {
        // uniform: 1 / |S^{D-1}| = Gamma(D/2) / (2 pi^{D/2})
        return ln_gamma(d / 2.0) - std::f64::consts::LN_2 - (d / 2.0) * std::f64::consts::PI.ln();
    }
    nu * kappa.ln() - (d / 2.0) * (2.0 * std::f64::consts::PI).ln() - ln_bessel_i(nu, kappa)
}
