//! The Dynamical CRP as a distribution over sample paths.
//!
//! Three views of the same process live here:
//!
//! * the exact conditional `p(c_n | c_<n, t_<=n)` ([`conditional_probs`]) and
//!   the ancestral sampler built on it ([`sample_path`]);
//! * the recursive marginal ([`MarginalState::step`]) that replaces the
//!   history with expected masses `E[N_c(t)]` and a distribution over the
//!   number of occupied tables;
//! * a Monte Carlo estimate of the marginals ([`monte_carlo_marginal`]) and
//!   the squared-error comparison between the two ([`marginal_mse`]).
//!
//! Cluster labels are 1-based in [`SamplePath`]; probability vectors are
//! 0-based with entry `k` holding the probability of label `k + 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::kernel::{ClusterMassState, TimeKernel};

/// Concentration and dynamics of a Dynamical CRP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    pub alpha: f64,
    pub kernel: TimeKernel,
}

impl ProcessParams {
    pub fn new(alpha: f64, kernel: TimeKernel) -> Result<Self> {
        let params = ProcessParams { alpha, kernel };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        self.kernel.validate()
    }
}

/// One realized sequence of assignments with its arrival times.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SamplePath {
    pub assignments: Vec<usize>,
    pub times: Vec<f64>,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.assignments.iter().copied().max().unwrap_or(0)
    }

    /// Checks lengths, time ordering and first-use label ordering.
    pub fn validate(&self) -> Result<()> {
        if self.assignments.len() != self.times.len() {
            return Err(Error::LengthMismatch {
                left: self.assignments.len(),
                right: self.times.len(),
            });
        }
        check_increasing(&self.times)?;
        let mut max_label = 0;
        for &c in &self.assignments {
            if c == 0 || c > max_label + 1 {
                return Err(Error::InvalidParameter(format!(
                    "label {c} breaks first-use ordering (max so far {max_label})"
                )));
            }
            max_label = max_label.max(c);
        }
        Ok(())
    }
}

pub(crate) fn check_increasing(times: &[f64]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonIncreasingTimes {
                index: i + 1,
                time: w[1],
                previous: w[0],
            });
        }
    }
    Ok(())
}

/// Per-cluster occupancies for a concrete history, updated one customer at a
/// time. This is what the sampler carries between draws.
#[derive(Debug, Clone)]
pub struct TableState {
    params: ProcessParams,
    tables: Vec<ClusterMassState>,
    last_time: Option<f64>,
}

impl TableState {
    pub fn new(params: ProcessParams) -> Self {
        TableState {
            params,
            tables: Vec::new(),
            last_time: None,
        }
    }

    pub fn num_tables(&self) -> usize {
        self.tables.len()
    }

    fn check_next(&self, t: f64) -> Result<()> {
        match self.last_time {
            Some(prev) if !(t > prev) => Err(Error::NonIncreasingTimes {
                index: self.tables.len(),
                time: t,
                previous: prev,
            }),
            _ => Ok(()),
        }
    }

    /// Probability vector over labels `1..=C+1` for a customer arriving at `t`.
    pub fn probs(&self, t: f64) -> Result<Vec<f64>> {
        self.check_next(t)?;
        if self.tables.is_empty() {
            return Ok(vec![1.0]);
        }
        let mut weights = Vec::with_capacity(self.tables.len() + 1);
        for table in &self.tables {
            weights.push(table.mass_at(t)?.max(0.0));
        }
        weights.push(self.params.alpha);
        normalize_in_place(&mut weights);
        Ok(weights)
    }

    /// Seats a customer at 1-based `label` at time `t`.
    pub fn seat(&mut self, label: usize, t: f64) -> Result<()> {
        self.check_next(t)?;
        if label == 0 || label > self.tables.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "label {label} not in 1..={}",
                self.tables.len() + 1
            )));
        }
        if label == self.tables.len() + 1 {
            self.tables
                .push(ClusterMassState::empty(self.params.kernel));
        }
        self.tables[label - 1].add_mass(1.0, t)?;
        self.last_time = Some(t);
        Ok(())
    }
}

fn normalize_in_place(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
}

/// Conditional distribution of the next label given a full history.
pub fn conditional_probs(
    params: &ProcessParams,
    history: &SamplePath,
    t_next: f64,
) -> Result<Vec<f64>> {
    history.validate()?;
    let mut state = TableState::new(*params);
    for (&c, &t) in history.assignments.iter().zip(&history.times) {
        state.seat(c, t)?;
    }
    state.probs(t_next)
}

/// Log-probability of a labelled assignment sequence, chaining the
/// conditionals. Returns negative infinity for impossible sequences.
pub fn log_path_probability(params: &ProcessParams, path: &SamplePath) -> Result<f64> {
    path.validate()?;
    let mut state = TableState::new(*params);
    let mut logp = 0.0;
    for (&c, &t) in path.assignments.iter().zip(&path.times) {
        let probs = state.probs(t)?;
        logp += probs[c - 1].ln();
        state.seat(c, t)?;
    }
    Ok(logp)
}

fn draw_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // rounding left u above the cumulative sum; take the last nonzero entry
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Ancestral sample using an existing RNG.
pub fn sample_path_with<R: Rng + ?Sized>(
    params: &ProcessParams,
    times: &[f64],
    rng: &mut R,
) -> Result<SamplePath> {
    check_increasing(times)?;
    let mut state = TableState::new(*params);
    let mut assignments = Vec::with_capacity(times.len());
    for &t in times {
        let probs = state.probs(t)?;
        let label = draw_categorical(&probs, rng) + 1;
        state.seat(label, t)?;
        assignments.push(label);
    }
    Ok(SamplePath {
        assignments,
        times: times.to_vec(),
    })
}

/// Ancestral sample of a full path; deterministic given `seed`.
pub fn sample_path(params: &ProcessParams, times: &[f64], seed: u64) -> Result<SamplePath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_path_with(params, times, &mut rng)
}

/// Running quantities of the recursive marginal approximation.
#[derive(Debug, Clone)]
pub struct MarginalState {
    expected_masses: Vec<ClusterMassState>,
    /// Entry `k` is `p(C_n = k + 1)`.
    count_dist: Vec<f64>,
    step_marginals: Vec<Vec<f64>>,
    n: usize,
    last_time: Option<f64>,
}

impl Default for MarginalState {
    fn default() -> Self {
        Self::new()
    }
}

impl MarginalState {
    pub fn new() -> Self {
        MarginalState {
            expected_masses: Vec::new(),
            count_dist: Vec::new(),
            step_marginals: Vec::new(),
            n: 0,
            last_time: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last_time
    }

    pub fn count_dist(&self) -> &[f64] {
        &self.count_dist
    }

    pub fn step_marginals(&self) -> &[Vec<f64>] {
        &self.step_marginals
    }

    pub fn into_step_marginals(self) -> Vec<Vec<f64>> {
        self.step_marginals
    }

    pub fn expected_masses(&self) -> &[ClusterMassState] {
        &self.expected_masses
    }

    /// `E[N_c(t)]` for every tracked cluster, clamped at zero.
    pub fn expected_masses_at(&self, t: f64) -> Result<Vec<f64>> {
        self.expected_masses
            .iter()
            .map(|s| s.mass_at(t).map(|m| m.max(0.0)))
            .collect()
    }

    /// Advances one observation and returns `p(c_n = .)` over `1..=n`.
    pub fn step(&mut self, params: &ProcessParams, t_next: f64) -> Result<Vec<f64>> {
        if let Some(prev) = self.last_time {
            if !(t_next > prev) {
                return Err(Error::TimeRegression {
                    current: prev,
                    requested: t_next,
                });
            }
        }
        let probs = if self.n == 0 {
            self.count_dist = vec![1.0];
            vec![1.0]
        } else {
            let masses = self.expected_masses_at(t_next)?;
            let (probs, p_new) = recursion_weights(params.alpha, &masses, &self.count_dist);
            self.count_dist = cluster_count_update(&self.count_dist, p_new);
            self.count_dist.truncate(self.n + 1);
            probs
        };
        while self.expected_masses.len() < probs.len() {
            self.expected_masses
                .push(ClusterMassState::empty(params.kernel));
        }
        for (state, &p) in self.expected_masses.iter_mut().zip(&probs) {
            state.add_mass(p, t_next)?;
        }
        self.n += 1;
        self.last_time = Some(t_next);
        self.step_marginals.push(probs.clone());
        Ok(probs)
    }
}

/// Core arithmetic shared by the prior recursion and the filtering prior:
/// `w_c = masses[c] + alpha * count_dist[c - 1]` over `c = 0..=masses.len()`,
/// normalized. `masses` must already be clamped. Also returns the share of
/// the total weight contributed by `alpha`.
pub(crate) fn recursion_weights(alpha: f64, masses: &[f64], count_dist: &[f64]) -> (Vec<f64>, f64) {
    let support = masses.len() + 1;
    let mut weights = vec![0.0; support];
    weights[..masses.len()].copy_from_slice(masses);
    for (k, &pk) in count_dist.iter().enumerate() {
        // count_dist[k] = p(C = k + 1) feeds label k + 2, i.e. index k + 1
        let idx = (k + 1).min(support - 1);
        weights[idx] += alpha * pk;
    }
    let mass_total: f64 = masses.iter().sum();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        let mut fallback = vec![0.0; support];
        fallback[support - 1] = 1.0;
        return (fallback, 1.0);
    }
    for w in &mut weights {
        *w /= total;
    }
    (weights, alpha / (alpha + mass_total))
}

/// Birth-process update of the table-count distribution:
/// `p(C_n = k) = p(C_{n-1} = k)(1 - p_new) + p(C_{n-1} = k - 1) p_new`.
/// The returned vector is one entry longer than the input.
pub fn cluster_count_update(count_dist: &[f64], p_new: f64) -> Vec<f64> {
    let mut next = vec![0.0; count_dist.len() + 1];
    for (k, &pk) in count_dist.iter().enumerate() {
        next[k] += pk * (1.0 - p_new);
        next[k + 1] += pk * p_new;
    }
    let total: f64 = next.iter().sum();
    if total > 0.0 {
        for v in &mut next {
            *v /= total;
        }
    }
    next
}

/// Runs the recursion over all `times` and returns the per-step marginals.
pub fn recursive_marginals(params: &ProcessParams, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_increasing(times)?;
    let mut state = MarginalState::new();
    for &t in times {
        state.step(params, t)?;
    }
    Ok(state.into_step_marginals())
}

/// Empirical per-step label frequencies over `num_samples` sample paths.
/// Step `n` (0-based) has support `1..=n + 1`.
pub fn monte_carlo_marginal(
    params: &ProcessParams,
    times: &[f64],
    num_samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be >= 1".into()));
    }
    check_increasing(times)?;
    let mut counts: Vec<Vec<u64>> = (0..times.len()).map(|n| vec![0; n + 1]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..num_samples {
        let path = sample_path_with(params, times, &mut rng)?;
        for (n, &c) in path.assignments.iter().enumerate() {
            counts[n][c - 1] += 1;
        }
    }
    let s = num_samples as f64;
    Ok(counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| c as f64 / s).collect())
        .collect())
}

/// Mean squared difference over every (step, cluster) entry, with ragged
/// rows padded by zeros to the widest row in either input.
pub fn marginal_mse(analytic: &[Vec<f64>], mc: &[Vec<f64>]) -> Result<f64> {
    if analytic.len() != mc.len() {
        return Err(Error::LengthMismatch {
            left: analytic.len(),
            right: mc.len(),
        });
    }
    if analytic.is_empty() {
        return Ok(0.0);
    }
    let width = analytic
        .iter()
        .chain(mc)
        .map(Vec::len)
        .max()
        .unwrap_or(0)
        .max(1);
    let mut total = 0.0;
    for (a, m) in analytic.iter().zip(mc) {
        for k in 0..width {
            let d = a.get(k).copied().unwrap_or(0.0) - m.get(k).copied().unwrap_or(0.0);
            total += d * d;
        }
    }
    Ok(total / (analytic.len() * width) as f64)
}

/// Writes analytic and Monte Carlo marginals as
/// `step,cluster,probability,source` rows (1-based step and cluster).
pub fn write_marginals_csv<W: Write>(
    mut out: W,
    analytic: &[Vec<f64>],
    mc: &[Vec<f64>],
) -> io::Result<()> {
    writeln!(out, "step,cluster,probability,source")?;
    for (source, rows) in [("analytic", analytic), ("mc", mc)] {
        for (n, row) in rows.iter().enumerate() {
            for (k, p) in row.iter().enumerate() {
                writeln!(out, "{},{},{},{}", n + 1, k + 1, p, source)?;
            }
        }
    }
    Ok(())
}
