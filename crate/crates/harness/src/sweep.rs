//! Gaussian and vMF sweeps: one dataset per grid point, every configured
//! method on each.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use dcrp::baselines::{
    batch_kmeans, default_dpmeans_lambda, dpmeans_batch, dpmeans_online_step, online_kmeans_step,
    DpmeansState, KmeansState,
};
use dcrp::datagen::{sample_mixture, write_jsonl, DatasetRecord, MixtureSpec};
use dcrp::likelihood::PriorSpec;
use dcrp::metrics::{cluster_count_curve, normalized_mutual_information, num_distinct};
use dcrp::{fit_stream, InferenceConfig, ProcessParams, TimeKernel};

use crate::output::{
    dynamics_label, ensure_dir, millis, slug, write_file, write_results, RunRecord,
};
use crate::seeding::{kernel_words, mix};
use crate::svg::{LineChart, Series};
use crate::{Experiment, ExperimentConfig, HarnessError, Method, Result, ResultRow, RunSummary};

/// One dataset of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub alpha: f64,
    pub snr: f64,
    pub dim: usize,
    pub kernel: TimeKernel,
    pub seed: u64,
}

impl Cell {
    fn vmf(experiment: Experiment) -> bool {
        experiment == Experiment::VmfSweep
    }

    /// Seed of the generated dataset, a function of this grid point alone.
    pub fn dataset_seed(&self, experiment: Experiment) -> u64 {
        let [k0, k1] = kernel_words(&self.kernel);
        mix(&[
            u64::from(Self::vmf(experiment)),
            self.alpha.to_bits(),
            self.snr.to_bits(),
            self.dim as u64,
            k0,
            k1,
            self.seed,
        ])
    }

    /// For vMF sweeps the `snr` axis is the likelihood concentration.
    pub fn mixture_spec(&self, experiment: Experiment, n_obs: usize) -> Result<MixtureSpec> {
        let process = ProcessParams::new(self.alpha, self.kernel)?;
        let seed = self.dataset_seed(experiment);
        let mut spec = if Self::vmf(experiment) {
            MixtureSpec::vmf(self.dim, self.snr, process, seed)
        } else {
            MixtureSpec::gaussian(self.dim, self.snr, process, seed)
        };
        spec.n_obs = n_obs;
        Ok(spec)
    }

    pub fn prior(&self, experiment: Experiment) -> PriorSpec {
        if Self::vmf(experiment) {
            PriorSpec::Vmf {
                kappa0: 0.0,
                sigma_o: 1.0 / self.snr.sqrt(),
            }
        } else {
            PriorSpec::Gaussian {
                rho: self.snr,
                sigma_o: 1.0,
            }
        }
    }

    fn tag(&self) -> String {
        format!(
            "a{}-snr{}-d{}-{}-s{}",
            self.alpha,
            self.snr,
            self.dim,
            slug(&dynamics_label(&self.kernel)),
            self.seed
        )
    }
}

/// Grid points in (alpha, snr, dim, dynamics, seed) order.
pub fn cells(config: &ExperimentConfig) -> Result<Vec<Cell>> {
    let kernels = config.kernels()?;
    let g = &config.grid;
    let mut out = Vec::new();
    for &alpha in &g.alpha {
        for &snr in &g.snr {
            for &dim in &g.dim {
                for &kernel in &kernels {
                    for &seed in &g.seeds {
                        out.push(Cell {
                            alpha,
                            snr,
                            dim,
                            kernel,
                            seed,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Labels from one method on one dataset, plus the settings that produced
/// them.
pub fn run_method(
    method: Method,
    cell: &Cell,
    experiment: Experiment,
    data: &[DatasetRecord],
    dpmeans_lambda: Option<f64>,
) -> Result<(Vec<usize>, serde_json::Value)> {
    let points = || -> Vec<Vec<f64>> { data.iter().map(|r| r.observation.to_real()).collect() };
    let k_true = num_distinct(&data.iter().map(|r| r.true_cluster).collect::<Vec<_>>()).max(1);
    let lambda = |pts: &[Vec<f64>]| dpmeans_lambda.unwrap_or_else(|| default_dpmeans_lambda(pts));
    Ok(match method {
        Method::Dcrp | Method::Rcrp => {
            let kernel = if method == Method::Rcrp {
                TimeKernel::Step
            } else {
                cell.kernel
            };
            let cfg = InferenceConfig::new(
                ProcessParams::new(cell.alpha, kernel)?,
                cell.prior(experiment),
            );
            let fit = fit_stream(data, &cfg)?;
            (fit.labels, json!({ "inference": cfg }))
        }
        Method::KmeansOnline => {
            let mut state = KmeansState::new(k_true)?;
            let labels = points()
                .iter()
                .map(|o| online_kmeans_step(&mut state, o))
                .collect::<dcrp::Result<_>>()?;
            (labels, json!({ "k": k_true }))
        }
        Method::KmeansBatch => {
            let seed = cell.dataset_seed(experiment);
            (
                batch_kmeans(&points(), k_true, seed)?,
                json!({ "k": k_true, "seed": seed }),
            )
        }
        Method::DpmeansOnline => {
            let pts = points();
            let l = lambda(&pts);
            let mut state = DpmeansState::new(l)?;
            let labels = pts
                .iter()
                .map(|o| dpmeans_online_step(&mut state, o))
                .collect::<dcrp::Result<_>>()?;
            (labels, json!({ "lambda": l }))
        }
        Method::DpmeansBatch => {
            let pts = points();
            let l = lambda(&pts);
            (dpmeans_batch(&pts, l)?, json!({ "lambda": l }))
        }
    })
}

/// Cluster-count curve kept at about 100 evenly spaced steps.
fn thin_curve(curve: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let n = curve.len();
    let stride = (n / 100).max(1);
    curve
        .into_iter()
        .filter(|(i, _)| i % stride == 0 || *i == n)
        .collect()
}

/// A row, its reproduction record and its thinned cluster-count curve.
pub struct Scored {
    pub record: RunRecord,
    pub curve: Vec<(usize, f64)>,
    /// Whether the unthinned curve never decreases.
    pub curve_non_decreasing: bool,
}

fn score(
    config: &ExperimentConfig,
    cell: &Cell,
    spec: &MixtureSpec,
    data: &[DatasetRecord],
    method: Method,
) -> Result<Scored> {
    let start = Instant::now();
    let (labels, settings) =
        run_method(method, cell, config.experiment, data, config.dpmeans_lambda)?;
    let runtime = millis(start);
    let truth: Vec<usize> = data.iter().map(|r| r.true_cluster).collect();
    let nmi = normalized_mutual_information(&truth, &labels)?;
    let full = cluster_count_curve(&labels, &truth)?;
    let curve_non_decreasing = full.windows(2).all(|w| w[1].1 >= w[0].1);
    let curve = thin_curve(full);
    let row = ResultRow {
        experiment: config.experiment.name().into(),
        method: method.name().into(),
        dynamics: dynamics_label(&cell.kernel),
        alpha: cell.alpha,
        snr: Some(cell.snr),
        dim: cell.dim,
        seed: cell.seed,
        nmi,
        num_clusters_inferred: num_distinct(&labels),
        num_clusters_true: num_distinct(&truth),
        runtime_ms: config.record_runtime.then_some(runtime),
    };
    Ok(Scored {
        record: RunRecord {
            row,
            config: json!({ "dataset": spec, "method": method.name(), "settings": settings }),
        },
        curve,
        curve_non_decreasing,
    })
}

/// Every (dataset, method) result in grid order, then method order.
pub fn score_grid(config: &ExperimentConfig) -> Result<Vec<Scored>> {
    let per_cell: Vec<Vec<Scored>> = cells(config)?
        .into_par_iter()
        .map(|cell| {
            let spec = cell.mixture_spec(config.experiment, config.n_obs)?;
            let data = sample_mixture(&spec)?;
            config
                .methods
                .iter()
                .map(|&m| score(config, &cell, &spec, &data, m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len().max(1) as f64
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<RunSummary> {
    if !matches!(
        config.experiment,
        Experiment::GaussianSweep | Experiment::VmfSweep
    ) {
        return Err(HarnessError::Config(format!(
            "sweep cannot run experiment {}",
            config.experiment
        )));
    }
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let scored = score_grid(config)?;
    let name = config.experiment.name();
    let mut files = Vec::new();
    let records: Vec<RunRecord> = scored.iter().map(|s| s.record.clone()).collect();
    write_results(dir, name, &records, &mut files)?;

    // (dynamics, method) -> alpha -> values, in first-seen dynamics order.
    let mut dynamics_order: Vec<String> = Vec::new();
    let mut by_alpha: BTreeMap<(String, Method), BTreeMap<u64, (f64, Vec<f64>, Vec<f64>)>> =
        BTreeMap::new();
    let mut curves: BTreeMap<(String, Method), Vec<Vec<(usize, f64)>>> = BTreeMap::new();
    for (s, method) in scored.iter().zip(config.methods.iter().cycle()) {
        let row = &s.record.row;
        if !dynamics_order.contains(&row.dynamics) {
            dynamics_order.push(row.dynamics.clone());
        }
        let key = (row.dynamics.clone(), *method);
        let slot = by_alpha
            .entry(key.clone())
            .or_default()
            .entry(row.alpha.to_bits())
            .or_insert((row.alpha, Vec::new(), Vec::new()));
        slot.1.push(row.nmi);
        slot.2.push(row.cluster_ratio());
        curves.entry(key).or_default().push(s.curve.clone());
    }

    let mean_curve = |runs: &[Vec<(usize, f64)>]| -> Vec<(f64, f64)> {
        let len = runs.iter().map(Vec::len).min().unwrap_or(0);
        (0..len)
            .map(|i| {
                let ys: Vec<f64> = runs.iter().map(|r| r[i].1).collect();
                (runs[0][i].0 as f64, mean(&ys))
            })
            .collect()
    };

    write_file(dir, &format!("{name}_cluster-count.csv"), &mut files, |w| {
        writeln!(w, "method,dynamics,step,mean_ratio")?;
        for dynamics in &dynamics_order {
            for &m in &config.methods {
                if let Some(runs) = curves.get(&(dynamics.clone(), m)) {
                    for (step, r) in mean_curve(runs) {
                        writeln!(w, "{m},{dynamics},{step},{r:.6}")?;
                    }
                }
            }
        }
        Ok(())
    })?;

    for dynamics in &dynamics_order {
        let series = |pick: fn(&(f64, Vec<f64>, Vec<f64>)) -> f64| -> Vec<Series> {
            config
                .methods
                .iter()
                .filter_map(|&m| {
                    let per_alpha = by_alpha.get(&(dynamics.clone(), m))?;
                    let mut points: Vec<(f64, f64)> =
                        per_alpha.values().map(|v| (v.0, pick(v))).collect();
                    points.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Some(Series {
                        name: m.name().into(),
                        points,
                    })
                })
                .collect()
        };
        let tag = slug(dynamics);
        let charts = [
            (
                format!("{name}_nmi-vs-alpha-{tag}.svg"),
                LineChart {
                    title: format!("mean NMI, {dynamics} data"),
                    x_label: "alpha".into(),
                    y_label: "NMI".into(),
                    series: series(|v| mean(&v.1)),
                    ..Default::default()
                },
            ),
            (
                format!("{name}_cluster-ratio-{tag}.svg"),
                LineChart {
                    title: format!("inferred / true clusters, {dynamics} data"),
                    x_label: "alpha".into(),
                    y_label: "ratio".into(),
                    log_y: true,
                    series: series(|v| mean(&v.2)),
                    ..Default::default()
                },
            ),
            (
                format!("{name}_cluster-count-{tag}.svg"),
                LineChart {
                    title: format!("clusters over time, {dynamics} data"),
                    x_label: "observations".into(),
                    y_label: "inferred / true clusters".into(),
                    series: config
                        .methods
                        .iter()
                        .filter_map(|&m| {
                            Some(Series {
                                name: m.name().into(),
                                points: mean_curve(curves.get(&(dynamics.clone(), m))?),
                            })
                        })
                        .collect(),
                    ..Default::default()
                },
            ),
        ];
        for (file, chart) in charts {
            write_file(dir, &file, &mut files, |w| {
                w.write_all(chart.render().as_bytes())
            })?;
        }
    }

    Ok(RunSummary {
        files,
        rows: records.into_iter().map(|r| r.row).collect(),
    })
}

/// Writes `<experiment>_dataset-<grid point>.jsonl` for every grid point.
pub fn generate_datasets(config: &ExperimentConfig) -> Result<RunSummary> {
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let name = config.experiment.name();
    let cells = cells(config)?;
    let datasets: Vec<Vec<DatasetRecord>> = cells
        .par_iter()
        .map(|c| {
            Ok(sample_mixture(
                &c.mixture_spec(config.experiment, config.n_obs)?,
            )?)
        })
        .collect::<Result<_>>()?;
    let mut files = Vec::new();
    for (cell, data) in cells.iter().zip(&datasets) {
        write_file(
            dir,
            &format!("{name}_dataset-{}.jsonl", cell.tag()),
            &mut files,
            |w| write_jsonl(w, data),
        )?;
    }
    Ok(RunSummary {
        files,
        rows: Vec::new(),
    })
}
