//! Topological mapping: gridworld trajectories clustered into places with a
//! Bernoulli landmark-visibility likelihood.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use dcrp::datagen::{
    generate_gridworld, simulate_trajectory, trajectory_positions, write_jsonl, DatasetRecord,
    GridworldEnv, GridworldSpec,
};
use dcrp::likelihood::PriorSpec;
use dcrp::metrics::{normalized_mutual_information, num_distinct};
use dcrp::{fit_stream, InferenceConfig, ProcessParams, TimeKernel};

use crate::output::{
    dynamics_label, ensure_dir, millis, slug, write_file, write_results, RunRecord,
};
use crate::seeding::mix;
use crate::svg::{Region, TrajectoryPlot};
use crate::{ExperimentConfig, Method, Result, ResultRow, RunSummary};

/// An environment with one trajectory through it.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub seed: u64,
    pub spec: GridworldSpec,
    pub env: GridworldEnv,
    pub positions: Vec<[f64; 2]>,
    pub data: Vec<DatasetRecord>,
}

pub fn world(config: &ExperimentConfig, seed: u64) -> Result<World> {
    let s = &config.slam;
    let mut spec = GridworldSpec::new(s.num_rooms, mix(&[0x5a, seed]));
    spec.landmarks_per_room = s.landmarks_per_room;
    spec.hallway_width = s.hallway_width;
    spec.view_radius = s.view_radius;
    let env = generate_gridworld(&spec)?;
    let walk_seed = mix(&[0x7a, seed]);
    Ok(World {
        seed,
        spec,
        positions: trajectory_positions(&env, walk_seed)?,
        data: simulate_trajectory(&env, walk_seed)?,
        env,
    })
}

/// Result of one method on one world.
#[derive(Debug, Clone, PartialEq)]
pub struct SlamRun {
    pub record: RunRecord,
    pub kernel: TimeKernel,
    pub method: Method,
    pub labels: Vec<usize>,
}

pub fn run_world(
    config: &ExperimentConfig,
    w: &World,
    alpha: f64,
    kernel: TimeKernel,
    method: Method,
) -> Result<SlamRun> {
    let used = if method == Method::Rcrp {
        TimeKernel::Step
    } else {
        kernel
    };
    let prior = PriorSpec::Bernoulli {
        gamma0: config.slam.gamma0,
        beta0: config.slam.beta0,
    };
    let cfg = InferenceConfig::new(ProcessParams::new(alpha, used)?, prior);
    let start = Instant::now();
    let fit = fit_stream(&w.data, &cfg)?;
    let runtime = millis(start);
    let truth: Vec<usize> = w.data.iter().map(|r| r.true_cluster).collect();
    let row = ResultRow {
        experiment: config.experiment.name().into(),
        method: method.name().into(),
        dynamics: dynamics_label(&kernel),
        alpha,
        snr: None,
        dim: w.env.landmarks.len(),
        seed: w.seed,
        nmi: normalized_mutual_information(&truth, &fit.labels)?,
        num_clusters_inferred: num_distinct(&fit.labels),
        num_clusters_true: num_distinct(&truth),
        runtime_ms: config.record_runtime.then_some(runtime),
    };
    Ok(SlamRun {
        record: RunRecord {
            row,
            config: json!({ "environment": w.spec, "method": method.name(), "inference": cfg }),
        },
        kernel,
        method,
        labels: fit.labels,
    })
}

/// Every run in (seed, alpha, dynamics, method) order.
pub fn slam_runs(config: &ExperimentConfig) -> Result<(Vec<World>, Vec<SlamRun>)> {
    let kernels = config.kernels()?;
    let worlds: Vec<World> = config
        .grid
        .seeds
        .par_iter()
        .map(|&s| world(config, s))
        .collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for (wi, _) in worlds.iter().enumerate() {
        for &alpha in &config.grid.alpha {
            for &kernel in &kernels {
                for &m in &config.methods {
                    jobs.push((wi, alpha, kernel, m));
                }
            }
        }
    }
    let runs = jobs
        .into_par_iter()
        .map(|(wi, alpha, kernel, m)| run_world(config, &worlds[wi], alpha, kernel, m))
        .collect::<Result<_>>()?;
    Ok((worlds, runs))
}

fn plot(w: &World, run: &SlamRun) -> TrajectoryPlot {
    let rect = |r: &dcrp::datagen::Rect, hallway| Region {
        x_min: r.x_min,
        y_min: r.y_min,
        x_max: r.x_max,
        y_max: r.y_max,
        hallway,
    };
    TrajectoryPlot {
        title: format!(
            "{} clusters, {} alpha={} seed {}",
            run.method, run.record.row.dynamics, run.record.row.alpha, w.seed
        ),
        regions: w
            .env
            .hallways
            .iter()
            .map(|h| rect(&h.rect, true))
            .chain(w.env.rooms.iter().map(|r| rect(&r.rect, false)))
            .collect(),
        landmarks: w.env.landmarks.iter().map(|l| l.position).collect(),
        points: w
            .positions
            .iter()
            .copied()
            .zip(run.labels.iter().copied())
            .collect(),
    }
}

fn write_world(
    dir: &std::path::Path,
    name: &str,
    w: &World,
    files: &mut Vec<std::path::PathBuf>,
) -> Result<()> {
    write_file(dir, &format!("{name}_env-s{}.json", w.seed), files, |out| {
        serde_json::to_writer_pretty(&mut *out, &w.env)?;
        out.write_all(b"\n")
    })?;
    write_file(
        dir,
        &format!("{name}_dataset-s{}.jsonl", w.seed),
        files,
        |out| write_jsonl(out, &w.data),
    )
}

pub fn run_slam(config: &ExperimentConfig) -> Result<RunSummary> {
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let name = config.experiment.name();
    let (worlds, runs) = slam_runs(config)?;
    let mut files = Vec::new();
    for w in &worlds {
        write_world(dir, name, w, &mut files)?;
    }
    for run in &runs {
        let row = &run.record.row;
        let w = worlds
            .iter()
            .find(|w| w.seed == row.seed)
            .expect("run belongs to a world");
        let tag = format!(
            "{}-{}-a{}-s{}",
            run.method,
            slug(&dynamics_label(&run.kernel)),
            row.alpha,
            row.seed
        );
        write_file(
            dir,
            &format!("{name}_labels-{tag}.csv"),
            &mut files,
            |out| {
                writeln!(out, "step,time,x,y,region,true_cluster,inferred_cluster")?;
                for ((r, p), l) in w.data.iter().zip(&w.positions).zip(&run.labels) {
                    let region = w.env.region_of(*p).unwrap_or(usize::MAX);
                    writeln!(
                        out,
                        "{},{},{:.4},{:.4},{region},{},{l}",
                        r.index + 1,
                        r.time,
                        p[0],
                        p[1],
                        r.true_cluster
                    )?;
                }
                Ok(())
            },
        )?;
        let svg = plot(w, run).render();
        write_file(
            dir,
            &format!("{name}_trajectory-{tag}.svg"),
            &mut files,
            |out| out.write_all(svg.as_bytes()),
        )?;
    }
    let records: Vec<RunRecord> = runs.iter().map(|r| r.record.clone()).collect();
    write_results(dir, name, &records, &mut files)?;
    Ok(RunSummary {
        files,
        rows: records.into_iter().map(|r| r.row).collect(),
    })
}

/// Writes environments and trajectories without running inference.
pub fn generate_environments(config: &ExperimentConfig) -> Result<RunSummary> {
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let mut files = Vec::new();
    for &s in &config.grid.seeds {
        write_world(
            dir,
            config.experiment.name(),
            &world(config, s)?,
            &mut files,
        )?;
    }
    Ok(RunSummary {
        files,
        rows: Vec::new(),
    })
}
