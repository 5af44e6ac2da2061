//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the crate's process or kernel code.
#![allow(dead_code)]

/// Kernel kinds mirrored locally so the oracles do not share code with the
/// crate under test.
#[derive(Debug, Clone, Copy)]
pub enum Kind {
    Step,
    Exp(f64),
    Cos(f64),
    Hyp(f64),
}

pub fn weight(kind: Kind, delta: f64) -> f64 {
    match kind {
        Kind::Step => 1.0,
        Kind::Exp(tau) => (-delta / tau).exp(),
        Kind::Cos(omega) => (omega * delta).cos(),
        Kind::Hyp(scale) => 1.0 / (1.0 + delta / scale),
    }
}

/// `p(c_n | c_<n)` by summing kernel weights over the raw history.
pub fn direct_conditional(
    kind: Kind,
    alpha: f64,
    labels: &[usize],
    times: &[f64],
    t_next: f64,
) -> Vec<f64> {
    let k = labels.iter().copied().max().unwrap_or(0);
    let mut w = vec![0.0; k + 1];
    for (&c, &s) in labels.iter().zip(times) {
        w[c - 1] += weight(kind, t_next - s);
    }
    for x in w.iter_mut().take(k) {
        *x = x.max(0.0);
    }
    w[k] = alpha;
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Probability of a 1-based first-appearance label sequence.
pub fn direct_path_probability(kind: Kind, alpha: f64, labels: &[usize], times: &[f64]) -> f64 {
    let mut p = 1.0;
    for n in 0..labels.len() {
        let probs = direct_conditional(kind, alpha, &labels[..n], &times[..n], times[n]);
        p *= probs.get(labels[n] - 1).copied().unwrap_or(0.0);
    }
    p
}

/// All first-appearance label sequences of length `n` (Bell(n) of them).
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in 1..=max + 1 {
            cur.push(c);
            rec(n, cur, max.max(c), out);
            cur.pop();
        }
    }
    rec(n, &mut cur, 0, &mut out);
    out
}

/// Exact per-step marginals by enumerating every sample path.
pub fn brute_force_marginals(kind: Kind, alpha: f64, times: &[f64]) -> Vec<Vec<f64>> {
    let n = times.len();
    let mut marg: Vec<Vec<f64>> = (0..n).map(|i| vec![0.0; i + 1]).collect();
    for path in restricted_growth_strings(n) {
        let p = direct_path_probability(kind, alpha, &path, times);
        for (i, &c) in path.iter().enumerate() {
            marg[i][c - 1] += p;
        }
    }
    marg
}

/// Chinese restaurant process marginals from its own recursion:
/// `p(c_n = c) = sum_{n'<n} p(c_n' = c) / (alpha + n - 1)
///              + alpha / (alpha + n - 1) * P(K_{n-1} = c - 1)`.
pub fn crp_recursion(alpha: f64, n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut cumulative = vec![0.0; n + 1];
    // tables[k] = P(K = k) after the customers so far
    let mut tables = vec![0.0; n + 2];
    tables[0] = 1.0;
    for i in 0..n {
        let denom = alpha + i as f64;
        let mut row = vec![0.0; i + 1];
        for (c, r) in row.iter_mut().enumerate() {
            *r = cumulative[c] / denom + alpha / denom * tables[c];
        }
        for (c, r) in row.iter().enumerate() {
            cumulative[c] += r;
        }
        let mut next = vec![0.0; n + 2];
        for k in 0..=i {
            next[k] += tables[k] * i as f64 / denom;
            next[k + 1] += tables[k] * alpha / denom;
        }
        tables = next;
        out.push(row);
    }
    out
}

/// The time-sensitive CRP conditional, written out term by term.
pub fn tscrp_conditional(
    tau: f64,
    alpha: f64,
    labels: &[usize],
    times: &[f64],
    t: f64,
) -> Vec<f64> {
    let k = labels.iter().copied().max().unwrap_or(0);
    let mut probs = Vec::with_capacity(k + 1);
    let mut denom = alpha;
    for c in 1..=k {
        let mut m = 0.0;
        for (&l, &s) in labels.iter().zip(times) {
            if l == c {
                m += (-(t - s) / tau).exp();
            }
        }
        probs.push(m);
        denom += m;
    }
    probs.push(alpha);
    probs.iter().map(|p| p / denom).collect()
}

/// NMI straight from the definitions, O(N K^2).
pub fn nmi_oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let la: Vec<usize> = distinct(a);
    let lb: Vec<usize> = distinct(b);
    let h = |labels: &[usize], xs: &[usize]| -> f64 {
        labels
            .iter()
            .map(|l| {
                let p = xs.iter().filter(|x| *x == l).count() as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let ha = h(&la, a);
    let hb = h(&lb, b);
    if la.len() == 1 && lb.len() == 1 {
        return 1.0;
    }
    if la.len() == 1 || lb.len() == 1 {
        return 0.0;
    }
    let mut mi = 0.0;
    for x in &la {
        for y in &lb {
            let nxy = a.iter().zip(b).filter(|(p, q)| *p == x && *q == y).count() as f64;
            if nxy > 0.0 {
                let nx = a.iter().filter(|p| *p == x).count() as f64;
                let ny = b.iter().filter(|q| *q == y).count() as f64;
                mi += nxy / n * (n * nxy / (nx * ny)).ln();
            }
        }
    }
    mi / (0.5 * (ha + hb))
}

fn distinct(xs: &[usize]) -> Vec<usize> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Relabels a set partition (given as the block of each item) in the order
/// the items arrive.
pub fn relabel_in_order(blocks: &[usize], order: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    order
        .iter()
        .map(|&item| {
            let b = blocks[item];
            match seen.iter().position(|&s| s == b) {
                Some(i) => i + 1,
                None => {
                    seen.push(b);
                    seen.len()
                }
            }
        })
        .collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| cur[i] < cur[i + 1])
        else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}
