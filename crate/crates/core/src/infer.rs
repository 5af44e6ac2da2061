//! Streaming variational inference under a Dynamical CRP prior.
//!
//! Each observation is processed once. The prior over its label is the
//! *approximate filtering prior*: the recursive-marginal arithmetic of
//! [`MarginalState`](crate::process::MarginalState), with the deposits being
//! past posterior responsibilities instead of prior marginals. Given that
//! prior, a few sweeps of coordinate ascent alternate the softmax over
//! assignment logits with the closed-form cluster updates.
//!
//! Exactly one *candidate* cluster is live at every step. It is initialized
//! from the prior at the current observation; if it ends up with enough
//! responsibility it becomes a permanent cluster and a fresh candidate is
//! drawn at the next observation.

use serde::{Deserialize, Serialize};

use crate::datagen::DatasetRecord;
use crate::error::{Error, Result};
use crate::kernel::ClusterMassState;
use crate::likelihood::{
    bernoulli_assignment_logits, beta_param_update, gaussian_assignment_logits,
    gaussian_param_update, softmax, vmf_assignment_logits, vmf_param_update, BetaPosterior,
    ClusterPosterior, GaussianPosterior, Observation, PriorSpec, VmfPosterior,
};
use crate::process::{cluster_count_update, recursion_weights, ProcessParams};

/// Knobs of the streaming engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub process: ProcessParams,
    pub prior: PriorSpec,
    #[serde(default = "default_sweeps")]
    pub cavi_sweeps: usize,
    #[serde(default = "default_tol")]
    pub convergence_tol: f64,
    /// A candidate whose final responsibility does not exceed this value is
    /// discarded instead of promoted, unless it is the most responsible
    /// cluster. Permanent clusters are never removed.
    #[serde(default = "default_prune")]
    pub prune_threshold: f64,
    /// Also run coordinate ascent from the observation hard-assigned to the
    /// candidate, keeping whichever run ends with the larger objective.
    #[serde(default = "default_restart")]
    pub candidate_restart: bool,
}

fn default_restart() -> bool {
    true
}

fn default_sweeps() -> usize {
    8
}

fn default_tol() -> f64 {
    1e-6
}

fn default_prune() -> f64 {
    DEFAULT_PRUNE_THRESHOLD
}

/// Default candidate threshold.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 0.01;

impl InferenceConfig {
    pub fn new(process: ProcessParams, prior: PriorSpec) -> Self {
        InferenceConfig {
            process,
            prior,
            cavi_sweeps: default_sweeps(),
            convergence_tol: default_tol(),
            prune_threshold: default_prune(),
            candidate_restart: default_restart(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.process.validate()?;
        self.prior.validate()?;
        if self.cavi_sweeps == 0 {
            return Err(Error::InvalidParameter("cavi_sweeps must be >= 1".into()));
        }
        if !(self.convergence_tol > 0.0) || !(self.prune_threshold >= 0.0) {
            return Err(Error::InvalidParameter(
                "convergence_tol must be > 0 and prune_threshold >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Family-homogeneous storage of cluster posteriors.
#[derive(Debug, Clone, PartialEq)]
enum ClusterSet {
    Gaussian(Vec<GaussianPosterior>),
    Beta(Vec<BetaPosterior>),
    Vmf(Vec<VmfPosterior>),
}

impl ClusterSet {
    fn empty(prior: &PriorSpec) -> Self {
        match prior {
            PriorSpec::Gaussian { .. } => ClusterSet::Gaussian(Vec::new()),
            PriorSpec::Bernoulli { .. } => ClusterSet::Beta(Vec::new()),
            PriorSpec::Vmf { .. } => ClusterSet::Vmf(Vec::new()),
        }
    }

    fn len(&self) -> usize {
        match self {
            ClusterSet::Gaussian(v) => v.len(),
            ClusterSet::Beta(v) => v.len(),
            ClusterSet::Vmf(v) => v.len(),
        }
    }

    fn get(&self, i: usize) -> Option<ClusterPosterior> {
        match self {
            ClusterSet::Gaussian(v) => v.get(i).cloned().map(ClusterPosterior::Gaussian),
            ClusterSet::Beta(v) => v.get(i).cloned().map(ClusterPosterior::Beta),
            ClusterSet::Vmf(v) => v.get(i).cloned().map(ClusterPosterior::Vmf),
        }
    }

    fn push(&mut self, post: ClusterPosterior) {
        match (self, post) {
            (ClusterSet::Gaussian(v), ClusterPosterior::Gaussian(p)) => v.push(p),
            (ClusterSet::Beta(v), ClusterPosterior::Beta(p)) => v.push(p),
            (ClusterSet::Vmf(v), ClusterPosterior::Vmf(p)) => v.push(p),
            _ => unreachable!("cluster set and posterior share the prior family"),
        }
    }
}

/// Per-family view of one CAVI problem, generic over the posterior type.
trait Conjugate: Clone {
    type Obs: ?Sized;

    fn logits(
        obs: &Self::Obs,
        posts: &[Self],
        log_prior: &[f64],
        prior: &PriorSpec,
    ) -> Result<Vec<f64>>;
    fn update(obs: &Self::Obs, pi: f64, prev: &Self, prior: &PriorSpec) -> Result<Self>;
    fn expected_log_lik(&self, obs: &Self::Obs, prior: &PriorSpec) -> f64;
    fn expected_log_density_under(&self, prev: &Self) -> f64;
    fn entropy(&self) -> f64;
}

fn sigma_of(prior: &PriorSpec) -> f64 {
    match *prior {
        PriorSpec::Gaussian { sigma_o, .. } | PriorSpec::Vmf { sigma_o, .. } => sigma_o,
        PriorSpec::Bernoulli { .. } => f64::NAN,
    }
}

impl Conjugate for GaussianPosterior {
    type Obs = [f64];

    fn logits(obs: &[f64], posts: &[Self], lp: &[f64], prior: &PriorSpec) -> Result<Vec<f64>> {
        gaussian_assignment_logits(obs, posts, lp, sigma_of(prior))
    }
    fn update(obs: &[f64], pi: f64, prev: &Self, prior: &PriorSpec) -> Result<Self> {
        gaussian_param_update(obs, pi, prev, sigma_of(prior))
    }
    fn expected_log_lik(&self, obs: &[f64], prior: &PriorSpec) -> f64 {
        GaussianPosterior::expected_log_lik(self, obs, sigma_of(prior))
    }
    fn expected_log_density_under(&self, prev: &Self) -> f64 {
        GaussianPosterior::expected_log_density_under(self, prev)
    }
    fn entropy(&self) -> f64 {
        GaussianPosterior::entropy(self)
    }
}

impl Conjugate for BetaPosterior {
    type Obs = [u8];

    fn logits(obs: &[u8], posts: &[Self], lp: &[f64], _: &PriorSpec) -> Result<Vec<f64>> {
        bernoulli_assignment_logits(obs, posts, lp)
    }
    fn update(obs: &[u8], pi: f64, prev: &Self, _: &PriorSpec) -> Result<Self> {
        beta_param_update(obs, pi, prev)
    }
    fn expected_log_lik(&self, obs: &[u8], _: &PriorSpec) -> f64 {
        BetaPosterior::expected_log_lik(self, obs)
    }
    fn expected_log_density_under(&self, prev: &Self) -> f64 {
        BetaPosterior::expected_log_density_under(self, prev)
    }
    fn entropy(&self) -> f64 {
        BetaPosterior::entropy(self)
    }
}

impl Conjugate for VmfPosterior {
    type Obs = [f64];

    fn logits(obs: &[f64], posts: &[Self], lp: &[f64], prior: &PriorSpec) -> Result<Vec<f64>> {
        vmf_assignment_logits(obs, posts, lp, sigma_of(prior))
    }
    fn update(obs: &[f64], pi: f64, prev: &Self, prior: &PriorSpec) -> Result<Self> {
        vmf_param_update(obs, pi, prev, sigma_of(prior))
    }
    fn expected_log_lik(&self, obs: &[f64], prior: &PriorSpec) -> f64 {
        VmfPosterior::expected_log_lik(self, obs, sigma_of(prior))
    }
    fn expected_log_density_under(&self, prev: &Self) -> f64 {
        VmfPosterior::expected_log_density_under(self, prev)
    }
    fn entropy(&self) -> f64 {
        VmfPosterior::entropy(self)
    }
}

fn update_all<P: Conjugate>(
    obs: &P::Obs,
    pi: &[f64],
    prev: &[P],
    prior: &PriorSpec,
) -> Result<Vec<P>> {
    prev.iter()
        .zip(pi)
        .map(|(p, &w)| P::update(obs, w.clamp(0.0, 1.0), p, prior))
        .collect()
}

fn elbo_of<P: Conjugate>(
    obs: &P::Obs,
    pi: &[f64],
    params: &[P],
    prev: &[P],
    log_prior: &[f64],
    prior: &PriorSpec,
) -> f64 {
    let mut value = 0.0;
    for (((&w, q), p), &lp) in pi.iter().zip(params).zip(prev).zip(log_prior) {
        if w > 0.0 {
            value += w * (lp + q.expected_log_lik(obs, prior) - w.ln());
        }
        value += q.expected_log_density_under(p) + q.entropy();
    }
    value
}

/// Outcome of coordinate ascent for one observation.
#[derive(Debug, Clone)]
struct CaviOutcome<P> {
    pi: Vec<f64>,
    params: Vec<P>,
    elbo_trace: Vec<f64>,
}

fn run_cavi<P: Conjugate>(
    obs: &P::Obs,
    prev: &[P],
    log_prior: &[f64],
    config: &InferenceConfig,
    trace: bool,
) -> Result<CaviOutcome<P>> {
    let from_prior = sweep_from(obs, prev.to_vec(), prev, log_prior, config, trace)?;
    if !config.candidate_restart || prev.len() < 2 {
        return Ok(from_prior);
    }
    // second start: the observation fully assigned to the candidate
    let mut hard = vec![0.0; prev.len()];
    hard[prev.len() - 1] = 1.0;
    let seeded = update_all(obs, &hard, prev, &config.prior)?;
    let from_candidate = sweep_from(obs, seeded, prev, log_prior, config, trace)?;
    let score = |o: &CaviOutcome<P>| elbo_of(obs, &o.pi, &o.params, prev, log_prior, &config.prior);
    if score(&from_candidate) > score(&from_prior) {
        Ok(from_candidate)
    } else {
        Ok(from_prior)
    }
}

fn sweep_from<P: Conjugate>(
    obs: &P::Obs,
    mut params: Vec<P>,
    prev: &[P],
    log_prior: &[f64],
    config: &InferenceConfig,
    trace: bool,
) -> Result<CaviOutcome<P>> {
    let prior = &config.prior;
    let mut pi: Vec<f64> = Vec::new();
    let mut elbo_trace = Vec::new();
    for _ in 0..config.cavi_sweeps {
        let next_pi = softmax(&P::logits(obs, &params, log_prior, prior)?);
        params = update_all(obs, &next_pi, prev, prior)?;
        if trace {
            elbo_trace.push(elbo_of(obs, &next_pi, &params, prev, log_prior, prior));
        }
        let converged = !pi.is_empty()
            && pi
                .iter()
                .zip(&next_pi)
                .all(|(a, b)| (a - b).abs() < config.convergence_tol);
        pi = next_pi;
        if converged {
            break;
        }
    }
    Ok(CaviOutcome {
        pi,
        params,
        elbo_trace,
    })
}

/// The variational problem posed by one observation: the filtering prior and
/// the cluster posteriors before the observation (candidate last).
///
/// Use it to evaluate the surrogate objective at arbitrary `(pi, params)`.
#[derive(Debug, Clone)]
pub struct CaviProblem {
    observation: Observation,
    prior_probs: Vec<f64>,
    log_prior: Vec<f64>,
    prev: ClusterSet,
    config: InferenceConfig,
}

impl CaviProblem {
    pub fn prior_probs(&self) -> &[f64] {
        &self.prior_probs
    }

    pub fn num_candidates(&self) -> usize {
        self.prev.len()
    }

    /// Cluster posteriors before the observation, candidate last.
    pub fn previous(&self) -> Vec<ClusterPosterior> {
        (0..self.prev.len())
            .filter_map(|i| self.prev.get(i))
            .collect()
    }

    /// Softmax of the assignment logits at the given cluster parameters.
    pub fn optimal_responsibilities(&self, params: &[ClusterPosterior]) -> Result<Vec<f64>> {
        let set = collect_set(params, &self.config.prior)?;
        let logits = match (&set, &self.observation) {
            (ClusterSet::Gaussian(ps), Observation::Real(o)) => {
                GaussianPosterior::logits(o, ps, &self.log_prior, &self.config.prior)?
            }
            (ClusterSet::Beta(ps), Observation::Binary(o)) => {
                BetaPosterior::logits(o, ps, &self.log_prior, &self.config.prior)?
            }
            (ClusterSet::Vmf(ps), Observation::Real(o)) => {
                VmfPosterior::logits(o, ps, &self.log_prior, &self.config.prior)?
            }
            _ => return Err(family_mismatch(&self.config.prior)),
        };
        Ok(softmax(&logits))
    }

    /// Optimal cluster parameters given responsibilities `pi`.
    pub fn optimal_params(&self, pi: &[f64]) -> Result<Vec<ClusterPosterior>> {
        check_pi_len(pi, self.prev.len())?;
        let prior = &self.config.prior;
        Ok(match (&self.prev, &self.observation) {
            (ClusterSet::Gaussian(ps), Observation::Real(o)) => {
                update_all(o.as_slice(), pi, ps, prior)?
                    .into_iter()
                    .map(ClusterPosterior::Gaussian)
                    .collect()
            }
            (ClusterSet::Beta(ps), Observation::Binary(o)) => {
                update_all(o.as_slice(), pi, ps, prior)?
                    .into_iter()
                    .map(ClusterPosterior::Beta)
                    .collect()
            }
            (ClusterSet::Vmf(ps), Observation::Real(o)) => update_all(o.as_slice(), pi, ps, prior)?
                .into_iter()
                .map(ClusterPosterior::Vmf)
                .collect(),
            _ => return Err(family_mismatch(prior)),
        })
    }

    /// Surrogate evidence lower bound
    /// `E_q[log p(o | c, phi) + log q(c, phi | o_<n)] + H[q]`.
    ///
    /// All three families include every term, normalizers of the filtering
    /// prior over `phi` and of the observation density included.
    pub fn elbo(&self, pi: &[f64], params: &[ClusterPosterior]) -> Result<f64> {
        check_pi_len(pi, self.prev.len())?;
        let set = collect_set(params, &self.config.prior)?;
        let prior = &self.config.prior;
        let lp = &self.log_prior;
        Ok(match (&set, &self.prev, &self.observation) {
            (ClusterSet::Gaussian(q), ClusterSet::Gaussian(p), Observation::Real(o)) => {
                elbo_of(o.as_slice(), pi, q, p, lp, prior)
            }
            (ClusterSet::Beta(q), ClusterSet::Beta(p), Observation::Binary(o)) => {
                elbo_of(o.as_slice(), pi, q, p, lp, prior)
            }
            (ClusterSet::Vmf(q), ClusterSet::Vmf(p), Observation::Real(o)) => {
                elbo_of(o.as_slice(), pi, q, p, lp, prior)
            }
            _ => return Err(family_mismatch(prior)),
        })
    }
}

fn check_pi_len(pi: &[f64], expected: usize) -> Result<()> {
    if pi.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found: pi.len(),
        })
    }
}

fn family_mismatch(prior: &PriorSpec) -> Error {
    Error::FamilyMismatch {
        expected: prior.family_name(),
    }
}

fn collect_set(params: &[ClusterPosterior], prior: &PriorSpec) -> Result<ClusterSet> {
    let mut set = ClusterSet::empty(prior);
    for p in params {
        let ok = matches!(
            (&set, p),
            (ClusterSet::Gaussian(_), ClusterPosterior::Gaussian(_))
                | (ClusterSet::Beta(_), ClusterPosterior::Beta(_))
                | (ClusterSet::Vmf(_), ClusterPosterior::Vmf(_))
        );
        if !ok {
            return Err(family_mismatch(prior));
        }
        set.push(p.clone());
    }
    Ok(set)
}

/// Evaluates [`CaviProblem::elbo`]; free-function form.
pub fn surrogate_elbo(
    problem: &CaviProblem,
    pi: &[f64],
    params: &[ClusterPosterior],
) -> Result<f64> {
    problem.elbo(pi, params)
}

/// Result of one [`StreamingPosterior::observe_traced`] call.
#[derive(Debug, Clone, PartialEq)]
pub struct Observed {
    /// Responsibilities over the permanent clusters and the candidate (last).
    pub responsibilities: Vec<f64>,
    /// Surrogate objective after each CAVI sweep.
    pub elbo_trace: Vec<f64>,
    /// Whether the candidate became a permanent cluster.
    pub created_cluster: bool,
}

/// Streaming posterior over assignments and cluster parameters.
#[derive(Debug, Clone)]
pub struct StreamingPosterior {
    masses: Vec<ClusterMassState>,
    /// `count_dist[k] = q(C_n = k + 1)`.
    count_dist: Vec<f64>,
    clusters: ClusterSet,
    candidate: Option<ClusterPosterior>,
    dim: Option<usize>,
    last_time: Option<f64>,
    n: usize,
}

impl StreamingPosterior {
    pub fn new(config: &InferenceConfig) -> Self {
        StreamingPosterior {
            masses: Vec::new(),
            count_dist: Vec::new(),
            clusters: ClusterSet::empty(&config.prior),
            candidate: None,
            dim: None,
            last_time: None,
            n: 0,
        }
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn num_observations(&self) -> usize {
        self.n
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last_time
    }

    pub fn count_dist(&self) -> &[f64] {
        &self.count_dist
    }

    /// Permanent clusters followed by the live candidate (once one exists).
    pub fn posteriors(&self) -> Vec<ClusterPosterior> {
        (0..self.clusters.len())
            .filter_map(|i| self.clusters.get(i))
            .chain(self.candidate.clone())
            .collect()
    }

    /// Stored deposit events across all clusters (grows only under the
    /// hyperbolic kernel).
    pub fn num_mass_events(&self) -> usize {
        self.masses.iter().map(ClusterMassState::num_events).sum()
    }

    /// `q(c_n | o_<n)` over labels `1..=C+1` for an observation at time `t`.
    pub fn approximate_filtering_prior(&self, params: &ProcessParams, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        if self.n == 0 {
            return Ok(vec![1.0]);
        }
        let masses = self
            .masses
            .iter()
            .map(|s| s.mass_at(t).map(|m| m.max(0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(recursion_weights(params.alpha, &masses, &self.count_dist).0)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        match self.last_time {
            Some(prev) if !(t > prev) => Err(Error::TimeRegression {
                current: prev,
                requested: t,
            }),
            _ if !t.is_finite() => Err(Error::InvalidParameter(format!("time {t} not finite"))),
            _ => Ok(()),
        }
    }

    fn check_observation(&self, obs: &Observation, prior: &PriorSpec) -> Result<()> {
        let family_ok = matches!(
            (prior, obs),
            (PriorSpec::Gaussian { .. }, Observation::Real(_))
                | (PriorSpec::Vmf { .. }, Observation::Real(_))
                | (PriorSpec::Bernoulli { .. }, Observation::Binary(_))
        );
        if !family_ok {
            return Err(family_mismatch(prior));
        }
        if let Some(d) = self.dim {
            if obs.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: obs.dim(),
                });
            }
        }
        Ok(())
    }

    /// Sets up the variational problem for an observation without consuming it.
    pub fn prepare(
        &self,
        obs: &Observation,
        t: f64,
        config: &InferenceConfig,
    ) -> Result<CaviProblem> {
        self.check_observation(obs, &config.prior)?;
        let prior_probs = self.approximate_filtering_prior(&config.process, t)?;
        let log_prior = prior_probs.iter().map(|p| p.ln()).collect();
        let mut prev = self.clusters.clone();
        prev.push(config.prior.new_cluster(obs)?);
        Ok(CaviProblem {
            observation: obs.clone(),
            prior_probs,
            log_prior,
            prev,
            config: *config,
        })
    }

    /// Consumes one observation; returns its responsibilities.
    pub fn observe(
        &mut self,
        obs: &Observation,
        t: f64,
        config: &InferenceConfig,
    ) -> Result<Vec<f64>> {
        self.observe_inner(obs, t, config, false)
            .map(|o| o.responsibilities)
    }

    /// As [`observe`](Self::observe), also recording the surrogate objective
    /// after every sweep.
    pub fn observe_traced(
        &mut self,
        obs: &Observation,
        t: f64,
        config: &InferenceConfig,
    ) -> Result<Observed> {
        self.observe_inner(obs, t, config, true)
    }

    fn observe_inner(
        &mut self,
        obs: &Observation,
        t: f64,
        config: &InferenceConfig,
        trace: bool,
    ) -> Result<Observed> {
        let problem = self.prepare(obs, t, config)?;
        let (pi, params, elbo_trace) = match (&problem.prev, obs) {
            (ClusterSet::Gaussian(prev), Observation::Real(o)) => {
                let out = run_cavi(o.as_slice(), prev, &problem.log_prior, config, trace)?;
                (out.pi, ClusterSet::Gaussian(out.params), out.elbo_trace)
            }
            (ClusterSet::Beta(prev), Observation::Binary(o)) => {
                let out = run_cavi(o.as_slice(), prev, &problem.log_prior, config, trace)?;
                (out.pi, ClusterSet::Beta(out.params), out.elbo_trace)
            }
            (ClusterSet::Vmf(prev), Observation::Real(o)) => {
                let out = run_cavi(o.as_slice(), prev, &problem.log_prior, config, trace)?;
                (out.pi, ClusterSet::Vmf(out.params), out.elbo_trace)
            }
            _ => return Err(family_mismatch(&config.prior)),
        };

        let c = self.clusters.len();
        let p_cand = pi[c];
        let argmax = argmax(&pi);
        let promote = c == 0 || p_cand > config.prune_threshold || argmax == c;

        for (state, &w) in self.masses.iter_mut().zip(&pi[..c]) {
            state.add_mass(w, t)?;
        }
        let mut clusters = split_set(params, c);
        if promote {
            let mut state = ClusterMassState::empty(config.process.kernel);
            state.add_mass(p_cand, t)?;
            self.masses.push(state);
        } else {
            clusters.1 = None;
        }
        self.clusters = clusters.0;
        if let Some(newest) = clusters.1 {
            self.clusters.push(newest);
        }
        self.candidate = config.prior.new_cluster(obs).ok();

        self.count_dist = if self.n == 0 {
            vec![1.0]
        } else {
            cluster_count_update(&self.count_dist, p_cand)
        };
        let support = self.clusters.len().max(1);
        if self.count_dist.len() > support {
            let overflow: f64 = self.count_dist[support..].iter().sum();
            self.count_dist.truncate(support);
            self.count_dist[support - 1] += overflow;
        }

        self.dim = Some(obs.dim());
        self.last_time = Some(t);
        self.n += 1;
        Ok(Observed {
            responsibilities: pi,
            elbo_trace,
            created_cluster: promote,
        })
    }
}

fn split_set(set: ClusterSet, keep: usize) -> (ClusterSet, Option<ClusterPosterior>) {
    match set {
        ClusterSet::Gaussian(mut v) => {
            let last = v.pop().map(ClusterPosterior::Gaussian);
            debug_assert_eq!(v.len(), keep);
            (ClusterSet::Gaussian(v), last)
        }
        ClusterSet::Beta(mut v) => {
            let last = v.pop().map(ClusterPosterior::Beta);
            debug_assert_eq!(v.len(), keep);
            (ClusterSet::Beta(v), last)
        }
        ClusterSet::Vmf(mut v) => {
            let last = v.pop().map(ClusterPosterior::Vmf);
            debug_assert_eq!(v.len(), keep);
            (ClusterSet::Vmf(v), last)
        }
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Output of [`fit_stream`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamFit {
    /// 1-based most-responsible cluster per observation.
    pub labels: Vec<usize>,
    pub responsibilities: Vec<Vec<f64>>,
    /// Permanent clusters after each observation.
    pub cluster_counts: Vec<usize>,
}

/// Replays a dataset through a fresh [`StreamingPosterior`].
pub fn fit_stream(dataset: &[DatasetRecord], config: &InferenceConfig) -> Result<StreamFit> {
    config.validate()?;
    let mut state = StreamingPosterior::new(config);
    let mut fit = StreamFit::default();
    for record in dataset {
        let pi = state.observe(&record.observation, record.time, config)?;
        fit.labels.push(argmax(&pi) + 1);
        fit.responsibilities.push(pi);
        fit.cluster_counts.push(state.num_clusters());
    }
    Ok(fit)
}
