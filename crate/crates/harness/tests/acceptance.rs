//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dcrp::infer::StreamingPosterior;
use dcrp::likelihood::*;
use dcrp::process::{conditional_probs, log_path_probability, recursive_marginals};
use dcrp::special::{bessel_ratio, digamma, ln_bessel_i};
use dcrp::{InferenceConfig, ProcessParams, SamplePath, TimeKernel};
use dcrp_harness::config::{Dynamics, DynamicsName};
use dcrp_harness::output::read_results_csv;
use dcrp_harness::sweep::{score_grid, Scored};
use dcrp_harness::{mc, slam, Experiment, ExperimentConfig, Method, ResultRow};
use oracles::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn unit_times(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64).collect()
}

fn kernel_of(kind: Kind) -> TimeKernel {
    match kind {
        Kind::Step => TimeKernel::Step,
        Kind::Exp(tau) => TimeKernel::Exponential { tau },
        Kind::Cos(omega) => TimeKernel::Cosine { omega },
        Kind::Hyp(scale) => TimeKernel::Hyperbolic { scale },
    }
}

fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            let w = x.len().max(y.len());
            (0..w).map(move |k| {
                (x.get(k).copied().unwrap_or(0.0) - y.get(k).copied().unwrap_or(0.0)).abs()
            })
        })
        .fold(0.0, f64::max)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn crp_reduction() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 5.0] {
        let params = ProcessParams::new(alpha, TimeKernel::Step).unwrap();
        let ours = recursive_marginals(&params, &unit_times(20)).unwrap();
        let oracle = crp_recursion(alpha, 20);
        if ours.iter().zip(&oracle).any(|(a, b)| a.len() != b.len()) {
            return outcome(false, "row lengths differ");
        }
        worst = worst.max(max_abs_diff(&ours, &oracle));
    }
    outcome(worst < 1e-12, format!("max |diff| {worst:.2e}"))
}

fn tscrp_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let len = rng.random_range(0..=30);
        let tau = rng.random_range(0.2..5.0);
        let alpha = rng.random_range(0.1..10.0);
        let (mut labels, mut times, mut t, mut k) = (Vec::new(), Vec::new(), 0.0, 0);
        for _ in 0..len {
            t += rng.random_range(0.05..2.0);
            let c = rng.random_range(1..=k + 1);
            k = k.max(c);
            labels.push(c);
            times.push(t);
        }
        let t_next = t + rng.random_range(0.05..2.0);
        let params = ProcessParams::new(alpha, TimeKernel::Exponential { tau }).unwrap();
        let history = SamplePath {
            assignments: labels.clone(),
            times: times.clone(),
        };
        let ours = conditional_probs(&params, &history, t_next).unwrap();
        let oracle = tscrp_conditional(tau, alpha, &labels, &times, t_next);
        worst = worst.max(max_abs_diff(&[ours], &[oracle]));
    }
    outcome(
        worst < 1e-12,
        format!("max |diff| {worst:.2e} over 100 histories"),
    )
}

fn small_n_oracle() -> Outcome {
    let times = unit_times(5);
    let mut pass = true;
    let mut parts = Vec::new();
    for (kind, tol) in [
        (Kind::Step, 1e-10),
        (Kind::Exp(1.0), 0.02),
        (Kind::Cos(1.0), 0.02),
        (Kind::Hyp(1.0), 0.02),
    ] {
        let exact = brute_force_marginals(kind, 1.0, &times);
        let params = ProcessParams::new(1.0, kernel_of(kind)).unwrap();
        let ours = recursive_marginals(&params, &times).unwrap();
        let d = max_abs_diff(&ours, &exact);
        pass &= d <= tol;
        parts.push(format!(
            "{kind:?} {d:.2e}{}",
            if d <= tol { "" } else { " (over)" }
        ));
    }
    outcome(pass, parts.join(", "))
}

fn power_law() -> Outcome {
    let cfg = ExperimentConfig::smoke(Experiment::McValidation);
    let curves = mc::mse_curves(&cfg).unwrap();
    let mut bad = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in &curves {
        let slope = c.slope();
        lo = lo.min(slope);
        hi = hi.max(slope);
        if !c.is_decreasing() || !(-1.5..=-0.5).contains(&slope) {
            bad.push(format!(
                "{} alpha={} slope {slope:.2}{}",
                c.kernel.name(),
                c.alpha,
                if c.is_decreasing() {
                    ""
                } else {
                    " not decreasing"
                }
            ));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} curves, slopes in [{lo:.2}, {hi:.2}]", curves.len())
    } else {
        format!(
            "{} of {} curves out: {}",
            bad.len(),
            curves.len(),
            bad.join("; ")
        )
    };
    outcome(bad.is_empty() && curves.len() == 16, detail)
}

fn cavi_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut failures = Vec::new();
    let mut checks = 0;
    for i in 0..10_000 {
        checks += 1;
        let ok = match i % 4 {
            0 => {
                let d = rng.random_range(1..=4);
                let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
                let cov = &a * a.transpose() + DMatrix::identity(d, d) * 0.5;
                let mean: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
                let obs: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
                let sigma: f64 = rng.random_range(0.1..3.0);
                let prev = GaussianPosterior::new(mean.clone(), cov.clone()).unwrap();
                let post = gaussian_param_update(&obs, 1.0, &prev, sigma).unwrap();
                let prec = cov.try_inverse().unwrap();
                let post_cov = (&prec + DMatrix::identity(d, d) / (sigma * sigma))
                    .try_inverse()
                    .unwrap();
                let post_mean = &post_cov
                    * (&prec * DVector::from_vec(mean) + DVector::from_vec(obs) / (sigma * sigma));
                (0..d).all(|r| {
                    (post.mean()[r] - post_mean[r]).abs() < 1e-9
                        && (0..d)
                            .all(|c| (post.covariance()[(r, c)] - post_cov[(r, c)]).abs() < 1e-9)
                })
            }
            1 => {
                let d = rng.random_range(1..=10);
                let g: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..20.0)).collect();
                let b: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..20.0)).collect();
                let bits: Vec<u8> = (0..d).map(|_| rng.random_range(0..=1u8)).collect();
                let pi = rng.random_range(0.0..=1.0);
                let prev = BetaPosterior::new(g, b).unwrap();
                let post = beta_param_update(&bits, pi, &prev).unwrap();
                (0..d).all(|l| {
                    let x = f64::from(bits[l]);
                    post.gamma()[l] == prev.gamma()[l] + pi * x
                        && post.beta()[l] == prev.beta()[l] + pi * (1.0 - x)
                })
            }
            2 => {
                let d = rng.random_range(2..=6);
                let unit = |rng: &mut ChaCha8Rng| loop {
                    let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if n > 1e-3 {
                        break v.into_iter().map(|x| x / n).collect::<Vec<_>>();
                    }
                };
                let mu = unit(&mut rng);
                let obs = unit(&mut rng);
                let kappa = rng.random_range(0.0..100.0);
                let pi = rng.random_range(0.0..=1.0);
                let sigma: f64 = rng.random_range(0.1..2.0);
                let prev = VmfPosterior::new(mu.clone(), kappa).unwrap();
                let post = vmf_param_update(&obs, pi, &prev, sigma).unwrap();
                let norm = post.direction().iter().map(|v| v * v).sum::<f64>().sqrt();
                let r: f64 = mu
                    .iter()
                    .zip(&obs)
                    .map(|(m, o)| (kappa * m + pi / (sigma * sigma) * o).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (norm - 1.0).abs() < 1e-10
                    && (r < 1e-12 || (post.concentration() - r).abs() < 1e-10 * (1.0 + r))
            }
            _ => {
                let x: f64 = rng.random_range(0.05..30.0);
                let euler = 0.577_215_664_901_532_9;
                let ln_i = 0.5 * (2.0 / (std::f64::consts::PI * x)).ln() + x.sinh().ln();
                (digamma(1.0) + euler).abs() < 1e-6
                    && (digamma(0.5) + euler + 2.0 * std::f64::consts::LN_2).abs() < 1e-6
                    && (digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-6
                    && (bessel_ratio(0.5, x) - (1.0 / x.tanh() - 1.0 / x)).abs() < 1e-6
                    && (ln_bessel_i(0.5, x) - ln_i).abs() < 1e-6
            }
        };
        if !ok {
            failures.push(i);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checks} checks, {} failed {:?}",
            failures.len(),
            &failures[..failures.len().min(5)]
        ),
    )
}

fn elbo_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst: f64 = 0.0;
    let mut observations = 0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=4);
        let kernel = match rng.random_range(0..4) {
            0 => TimeKernel::Step,
            1 => TimeKernel::Exponential {
                tau: rng.random_range(0.5..10.0),
            },
            2 => TimeKernel::Cosine {
                omega: rng.random_range(0.1..1.0),
            },
            _ => TimeKernel::Hyperbolic {
                scale: rng.random_range(0.5..10.0),
            },
        };
        let mut cfg = InferenceConfig::new(
            ProcessParams::new(rng.random_range(0.1..5.0), kernel).unwrap(),
            PriorSpec::Gaussian {
                rho: rng.random_range(0.5..5.0),
                sigma_o: rng.random_range(0.2..2.0),
            },
        );
        cfg.convergence_tol = 1e-12;
        let mut state = StreamingPosterior::new(&cfg);
        let mut t = 0.0;
        for _ in 0..rng.random_range(1..=12) {
            t += rng.random_range(0.1..2.0);
            let o: Vec<f64> = (0..d).map(|_| rng.random_range(-6.0..6.0)).collect();
            let out = state
                .observe_traced(&Observation::Real(o), t, &cfg)
                .unwrap();
            observations += 1;
            for w in out.elbo_trace.windows(2) {
                worst = worst.max(w[0] - w[1]);
            }
        }
    }
    outcome(
        worst <= 1e-8,
        format!("{observations} observations, largest decrease {worst:.2e}"),
    )
}

fn gaussian_grid(dynamics: Dynamics, methods: Vec<Method>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::smoke(Experiment::GaussianSweep);
    cfg.grid.alpha = vec![1.1];
    cfg.grid.snr = vec![10.0];
    cfg.grid.dim = vec![2];
    cfg.grid.dynamics = vec![dynamics];
    cfg.grid.seeds = (0..10).collect();
    cfg.methods = methods;
    cfg.record_runtime = false;
    cfg
}

fn method_mean(scored: &[Scored], method: Method, f: fn(&ResultRow) -> f64) -> f64 {
    mean(
        scored
            .iter()
            .filter(|s| s.record.row.method == method.name())
            .map(|s| f(&s.record.row)),
    )
}

fn stationary(scored: &[Scored]) -> Outcome {
    let d = method_mean(scored, Method::Dcrp, |r| r.nmi);
    let dp = method_mean(scored, Method::DpmeansOnline, |r| r.nmi);
    outcome(
        d >= 0.7 && d >= dp - 0.05,
        format!("D-CRP mean NMI {d:.3}, online DP-means {dp:.3}"),
    )
}

fn nonstationary(scored: &[Scored]) -> Outcome {
    let d = method_mean(scored, Method::Dcrp, |r| r.nmi);
    let r = method_mean(scored, Method::Rcrp, |r| r.nmi);
    outcome(
        d - r >= 0.03,
        format!(
            "matching kernel {d:.3}, step kernel {r:.3}, advantage {:.3}",
            d - r
        ),
    )
}

fn cluster_counts(runs: &[&Scored]) -> Outcome {
    let ratios: Vec<f64> = runs.iter().map(|s| s.record.row.cluster_ratio()).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let curves = runs.iter().all(|s| s.curve_non_decreasing);
    outcome(
        ratios.iter().all(|r| (0.1..=10.0).contains(r)) && curves,
        format!(
            "{} runs, ratio in [{lo:.2}, {hi:.2}], curves non-decreasing: {curves}",
            runs.len()
        ),
    )
}

fn vmf_stream() -> Outcome {
    let mut cfg = ExperimentConfig::smoke(Experiment::VmfSweep);
    cfg.grid.alpha = vec![1.1];
    cfg.grid.snr = vec![50.0];
    cfg.grid.dim = vec![3];
    cfg.grid.dynamics = vec![Dynamics::Named(DynamicsName::Step)];
    cfg.grid.seeds = (0..10).collect();
    cfg.methods = vec![Method::Dcrp];
    let scored = score_grid(&cfg).unwrap();
    let nmi = method_mean(&scored, Method::Dcrp, |r| r.nmi);
    let ratios: Vec<f64> = scored
        .iter()
        .map(|s| s.record.row.cluster_ratio())
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        nmi >= 0.6 && ratios.iter().all(|r| (0.1..=10.0).contains(r)),
        format!("mean NMI {nmi:.3}, ratio in [{lo:.2}, {hi:.2}]"),
    )
}

fn slam_rooms() -> Outcome {
    let cfg = ExperimentConfig::smoke(Experiment::Slam);
    let (_, runs) = slam::slam_runs(&cfg).unwrap();
    let rooms = cfg.slam.num_rooms;
    let rows: Vec<&ResultRow> = runs.iter().map(|r| &r.record.row).collect();
    let worst = rows.iter().map(|r| r.nmi).fold(f64::INFINITY, f64::min);
    let most = rows
        .iter()
        .map(|r| r.num_clusters_inferred)
        .max()
        .unwrap_or(0);
    outcome(
        rows.len() == 5 && worst >= 0.6 && most <= rooms + 3,
        format!(
            "{} environments, min NMI {worst:.3}, mean NMI {:.3}, at most {most} clusters",
            rows.len(),
            mean(rows.iter().map(|r| r.nmi))
        ),
    )
}

fn exchangeability() -> Outcome {
    let perms = permutations(5);
    let prob = |kernel: TimeKernel, blocks: &[usize], order: &[usize]| {
        let params = ProcessParams::new(1.0, kernel).unwrap();
        let path = SamplePath {
            assignments: relabel_in_order(blocks, order),
            times: unit_times(blocks.len()),
        };
        log_path_probability(&params, &path).unwrap().exp()
    };
    let mut step_worst: f64 = 0.0;
    let mut exp_best: f64 = 0.0;
    for blocks in restricted_growth_strings(5) {
        let s0 = prob(TimeKernel::Step, &blocks, &perms[0]);
        let e0 = prob(TimeKernel::Exponential { tau: 1.0 }, &blocks, &perms[0]);
        for p in &perms {
            step_worst = step_worst.max((prob(TimeKernel::Step, &blocks, p) - s0).abs());
            exp_best =
                exp_best.max((prob(TimeKernel::Exponential { tau: 1.0 }, &blocks, p) - e0).abs());
        }
    }
    outcome(
        perms.len() == 120 && step_worst < 1e-12 && exp_best > 1e-3,
        format!("step max change {step_worst:.2e}, exponential max change {exp_best:.2e}"),
    )
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn sorted_untimed(rows: Vec<ResultRow>) -> Vec<String> {
    let mut v: Vec<String> = rows.iter().map(|r| format!("{:?}", r.untimed())).collect();
    v.sort();
    v
}

fn reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: usize, timed: bool| {
        let mut cfg = ExperimentConfig::smoke(Experiment::GaussianSweep);
        cfg.output_dir = tmp.path().join(name);
        cfg.workers = workers;
        cfg.record_runtime = timed;
        dcrp_harness::run(&cfg).unwrap();
        cfg.output_dir
    };
    let a = run("serial-a", 1, false);
    let b = run("serial-b", 1, false);
    let p = run("parallel", 4, true);
    let (ca, cb) = (csv_files(&a), csv_files(&b));
    let bytes_equal = !ca.is_empty() && ca == cb;
    let rows = |d: &Path| read_results_csv(&d.join("gaussian-sweep_results.csv")).unwrap();
    let serial_rows = rows(&a);
    let same_set = sorted_untimed(serial_rows.clone()) == sorted_untimed(rows(&p));
    outcome(
        bytes_equal && same_set && !serial_rows.is_empty(),
        format!(
            "{} rows, {} CSVs byte-identical serially: {bytes_equal}, parallel row set equal: {same_set}",
            serial_rows.len(),
            ca.len()
        ),
    )
}

fn main() {
    let mut results: Vec<(usize, bool)> = Vec::new();
    let mut report = |n: usize, name: &str, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took < budget;
        println!(
            "criterion {n:>2} {} {name}: {} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        results.push((n, pass));
    };
    let secs = Duration::from_secs;

    report(1, "CRP reduction", secs(1), &mut crp_reduction);
    report(2, "tsCRP reduction", secs(1), &mut tscrp_reduction);
    report(3, "small-N enumeration", secs(5), &mut small_n_oracle);
    report(4, "MSE power law", secs(300), &mut power_law);
    report(5, "CAVI identities", secs(30), &mut cavi_identities);
    report(
        6,
        "surrogate objective monotone",
        secs(60),
        &mut elbo_monotone,
    );

    let mut step_runs = Vec::new();
    let mut exp_runs = Vec::new();
    report(7, "stationary Gaussian recovery", secs(120), &mut || {
        step_runs = score_grid(&gaussian_grid(
            Dynamics::Named(DynamicsName::Step),
            vec![Method::Dcrp, Method::DpmeansOnline],
        ))
        .unwrap();
        stationary(&step_runs)
    });
    report(8, "non-stationary advantage", secs(120), &mut || {
        exp_runs = score_grid(&gaussian_grid(
            Dynamics::Kernel(TimeKernel::Exponential { tau: 10.0 }),
            vec![Method::Dcrp, Method::Rcrp],
        ))
        .unwrap();
        nonstationary(&exp_runs)
    });
    report(9, "cluster-count order of magnitude", secs(1), &mut || {
        cluster_counts(&step_runs.iter().chain(&exp_runs).collect::<Vec<_>>())
    });
    report(10, "vMF stream", secs(120), &mut vmf_stream);
    report(11, "SLAM rooms", secs(120), &mut slam_rooms);
    report(12, "exchangeability pair", secs(10), &mut exchangeability);
    report(13, "reproducibility", secs(180), &mut reproducibility);

    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
