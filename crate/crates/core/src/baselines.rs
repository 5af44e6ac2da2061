//! Hard-assignment baselines: sequential and Lloyd k-means, streaming and
//! batch DP-means. Labels are 0-based center indices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest center and its squared distance; ties go to the lowest index.
fn nearest(centers: &[Vec<f64>], obs: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in centers.iter().enumerate() {
        let d = dist2(c, obs);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best
}

fn running_mean(center: &mut [f64], count: usize, obs: &[f64]) {
    let w = 1.0 / count as f64;
    for (c, o) in center.iter_mut().zip(obs) {
        *c += w * (o - *c);
    }
}

fn check_dims(data: &[Vec<f64>]) -> Result<()> {
    if let Some(first) = data.first() {
        if let Some(bad) = data.iter().find(|v| v.len() != first.len()) {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: bad.len(),
            });
        }
    }
    Ok(())
}

/// MacQueen-style sequential k-means with a fixed number of centers.
#[derive(Debug, Clone, PartialEq)]
pub struct KmeansState {
    pub centers: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
    pub k: usize,
}

impl KmeansState {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        Ok(KmeansState {
            centers: Vec::new(),
            counts: Vec::new(),
            k,
        })
    }
}

/// The first `k` observations seed the centers; afterwards each observation
/// moves its nearest center by `(o - c) / n_c`.
pub fn online_kmeans_step(state: &mut KmeansState, obs: &[f64]) -> Result<usize> {
    if let Some(c) = state.centers.first() {
        if c.len() != obs.len() {
            return Err(Error::DimensionMismatch {
                expected: c.len(),
                found: obs.len(),
            });
        }
    }
    if state.centers.len() < state.k {
        state.centers.push(obs.to_vec());
        state.counts.push(1);
        return Ok(state.centers.len() - 1);
    }
    let (label, _) = nearest(&state.centers, obs).expect("k >= 1 centers");
    state.counts[label] += 1;
    running_mean(&mut state.centers[label], state.counts[label], obs);
    Ok(label)
}

/// Lloyd's algorithm with farthest-point seeding.
///
/// The first center is a seeded uniform draw; each further center is the
/// point farthest from those chosen so far. A center left empty is moved to
/// the point farthest from its current center.
pub fn batch_kmeans(data: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > data.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must lie in 1..={}",
            data.len()
        )));
    }
    check_dims(data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![data[rng.random_range(0..data.len())].clone()];
    let mut closest: Vec<f64> = data.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let far = argmax_first(&closest);
        centers.push(data[far].clone());
        for (d, p) in closest.iter_mut().zip(data) {
            *d = d.min(dist2(p, &centers[centers.len() - 1]));
        }
    }

    let dim = data[0].len();
    let mut labels = vec![0usize; data.len()];
    for _ in 0..300 {
        let mut dists = vec![0.0; data.len()];
        for (i, p) in data.iter().enumerate() {
            let (l, d) = nearest(&centers, p).expect("k >= 1");
            labels[i] = l;
            dists[i] = d;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in data.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut shift = 0.0f64;
        for j in 0..k {
            let next = if counts[j] == 0 {
                let far = argmax_first(&dists);
                dists[far] = 0.0;
                data[far].clone()
            } else {
                sums[j].iter().map(|s| s / counts[j] as f64).collect()
            };
            shift = shift.max(dist2(&next, &centers[j]));
            centers[j] = next;
        }
        if shift < 1e-8 {
            break;
        }
    }
    for (i, p) in data.iter().enumerate() {
        labels[i] = nearest(&centers, p).expect("k >= 1").0;
    }
    Ok(labels)
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Streaming DP-means.
#[derive(Debug, Clone, PartialEq)]
pub struct DpmeansState {
    pub centers: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
    /// Squared-distance threshold for opening a center.
    pub lambda: f64,
}

impl DpmeansState {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {lambda}"
            )));
        }
        Ok(DpmeansState {
            centers: Vec::new(),
            counts: Vec::new(),
            lambda,
        })
    }
}

/// Opens a center at `obs` when every squared distance exceeds `lambda`,
/// otherwise updates the nearest center's running mean.
pub fn dpmeans_online_step(state: &mut DpmeansState, obs: &[f64]) -> Result<usize> {
    match nearest(&state.centers, obs) {
        Some((l, _)) if state.centers[l].len() != obs.len() => Err(Error::DimensionMismatch {
            expected: state.centers[l].len(),
            found: obs.len(),
        }),
        Some((l, d)) if d <= state.lambda => {
            state.counts[l] += 1;
            running_mean(&mut state.centers[l], state.counts[l], obs);
            Ok(l)
        }
        _ => {
            state.centers.push(obs.to_vec());
            state.counts.push(1);
            Ok(state.centers.len() - 1)
        }
    }
}

/// `sum within-cluster squared distance + lambda * #clusters`.
pub fn dpmeans_objective(data: &[Vec<f64>], labels: &[usize], lambda: f64) -> f64 {
    let (centers, _) = cluster_means(data, labels);
    let sse: f64 = data
        .iter()
        .zip(labels)
        .map(|(p, &l)| dist2(p, &centers[l]))
        .sum();
    sse + lambda * centers.iter().filter(|c| !c.is_empty()).count() as f64
}

fn cluster_means(data: &[Vec<f64>], labels: &[usize]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let dim = data.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in data.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    let centers = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| {
            if c == 0 {
                Vec::new()
            } else {
                s.into_iter().map(|v| v / c as f64).collect()
            }
        })
        .collect();
    (centers, counts)
}

/// Batch DP-means: start from one center at the global mean, alternate
/// assignment-with-creation and mean updates until the labels stop changing.
pub fn dpmeans_batch(data: &[Vec<f64>], lambda: f64) -> Result<Vec<usize>> {
    dpmeans_batch_traced(data, lambda).map(|(labels, _)| labels)
}

/// As [`dpmeans_batch`], also returning the objective after every iteration.
pub fn dpmeans_batch_traced(data: &[Vec<f64>], lambda: f64) -> Result<(Vec<usize>, Vec<f64>)> {
    DpmeansState::new(lambda)?;
    check_dims(data)?;
    if data.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut labels = vec![0usize; data.len()];
    let mut centers = cluster_means(data, &labels).0;
    let mut trace = vec![dpmeans_objective(data, &labels, lambda)];
    for _ in 0..300 {
        let mut next = labels.clone();
        for (i, p) in data.iter().enumerate() {
            match nearest(&centers, p) {
                Some((l, d)) if d <= lambda => next[i] = l,
                _ => {
                    centers.push(p.clone());
                    next[i] = centers.len() - 1;
                }
            }
        }
        let next = compact(&next);
        let changed = next != labels;
        labels = next;
        centers = cluster_means(data, &labels).0;
        trace.push(dpmeans_objective(data, &labels, lambda));
        if !changed {
            break;
        }
    }
    Ok((labels, trace))
}

/// Renumbers labels to `0..k` in order of first appearance, dropping gaps.
fn compact(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<Option<usize>> = vec![None; labels.iter().max().map_or(0, |m| m + 1)];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            *map[l].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

/// `(median pairwise distance among the first 100 points)^2`.
pub fn default_dpmeans_lambda(data: &[Vec<f64>]) -> f64 {
    let head = &data[..data.len().min(100)];
    let mut d: Vec<f64> = Vec::new();
    for i in 0..head.len() {
        for j in i + 1..head.len() {
            d.push(dist2(&head[i], &head[j]).sqrt());
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(f64::total_cmp);
    let m = d.len();
    let median = if m % 2 == 1 {
        d[m / 2]
    } else {
        0.5 * (d[m / 2 - 1] + d[m / 2])
    };
    if median > 0.0 {
        median * median
    } else {
        1.0
    }
}
