//! Analytic marginals against Monte Carlo estimates of the prior.

use rayon::prelude::*;

use dcrp::process::{marginal_mse, monte_carlo_marginal, recursive_marginals, write_marginals_csv};
use dcrp::{ProcessParams, TimeKernel};

use crate::output::{dynamics_label, ensure_dir, slug, write_file};
use crate::seeding::{kernel_words, mix};
use crate::svg::{Heatmap, LineChart, Series};
use crate::{ExperimentConfig, Result, RunSummary};

/// MSE against sample count for one (kernel, alpha, seed).
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve {
    pub kernel: TimeKernel,
    pub alpha: f64,
    pub seed: u64,
    pub analytic: Vec<Vec<f64>>,
    /// Monte Carlo marginals at the largest sample count.
    pub mc_largest: Vec<Vec<f64>>,
    pub points: Vec<(usize, f64)>,
}

impl MseCurve {
    pub fn is_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn slope(&self) -> f64 {
        let xs: Vec<f64> = self.points.iter().map(|p| p.0 as f64).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.1).collect();
        loglog_slope(&xs, &ys)
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Every curve of the grid, in (kernel, alpha, seed) order.
pub fn mse_curves(config: &ExperimentConfig) -> Result<Vec<MseCurve>> {
    let kernels = config.kernels()?;
    let times: Vec<f64> = (1..=config.mc_steps).map(|n| n as f64).collect();
    let mut jobs = Vec::new();
    for kernel in &kernels {
        for &alpha in &config.grid.alpha {
            for &seed in &config.grid.seeds {
                jobs.push((*kernel, alpha, seed));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(kernel, alpha, seed)| {
            let params = ProcessParams::new(alpha, kernel)?;
            let analytic = recursive_marginals(&params, &times)?;
            let mut points = Vec::new();
            let mut mc_largest = Vec::new();
            for &s in &config.mc_samples {
                let [k0, k1] = kernel_words(&kernel);
                let mc_seed = mix(&[seed, k0, k1, alpha.to_bits(), s as u64]);
                let mc = monte_carlo_marginal(&params, &times, s, mc_seed)?;
                points.push((s, marginal_mse(&analytic, &mc)?));
                if s == config.mc_samples.iter().copied().max().unwrap_or(s) {
                    mc_largest = mc;
                }
            }
            Ok(MseCurve {
                kernel,
                alpha,
                seed,
                analytic,
                mc_largest,
                points,
            })
        })
        .collect()
}

pub fn run_mc_validation(config: &ExperimentConfig) -> Result<RunSummary> {
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let curves = mse_curves(config)?;
    let mut files = Vec::new();
    let name = config.experiment.name();

    write_file(dir, &format!("{name}_mse.csv"), &mut files, |w| {
        writeln!(w, "kernel,alpha,samples,seed,mse")?;
        for c in &curves {
            for (s, mse) in &c.points {
                writeln!(
                    w,
                    "{},{},{s},{},{mse:e}",
                    dynamics_label(&c.kernel),
                    c.alpha,
                    c.seed
                )?;
            }
        }
        Ok(())
    })?;
    write_file(dir, &format!("{name}_slopes.csv"), &mut files, |w| {
        writeln!(w, "kernel,alpha,seed,slope,decreasing")?;
        for c in &curves {
            writeln!(
                w,
                "{},{},{},{:.6},{}",
                dynamics_label(&c.kernel),
                c.alpha,
                c.seed,
                c.slope(),
                c.is_decreasing()
            )?;
        }
        Ok(())
    })?;

    for c in &curves {
        let tag = format!(
            "{}-a{}-s{}",
            slug(&dynamics_label(&c.kernel)),
            c.alpha,
            c.seed
        );
        write_file(
            dir,
            &format!("{name}_marginals-{tag}.csv"),
            &mut files,
            |w| write_marginals_csv(w, &c.analytic, &c.mc_largest),
        )?;
        let heat = Heatmap {
            title: format!(
                "p(c_n = k), {} alpha={}",
                dynamics_label(&c.kernel),
                c.alpha
            ),
            x_label: "cluster".into(),
            y_label: "step".into(),
            rows: c.analytic.clone(),
        };
        write_file(dir, &format!("{name}_heatmap-{tag}.svg"), &mut files, |w| {
            w.write_all(heat.render().as_bytes())
        })?;
    }

    let first_seed = config.grid.seeds[0];
    for kernel in config.kernels()? {
        let label = dynamics_label(&kernel);
        let chart = LineChart {
            title: format!("analytic vs Monte Carlo marginals, {label}"),
            x_label: "samples".into(),
            y_label: "MSE".into(),
            log_x: true,
            log_y: true,
            series: curves
                .iter()
                .filter(|c| c.kernel == kernel && c.seed == first_seed)
                .map(|c| Series {
                    name: format!("alpha={}", c.alpha),
                    points: c.points.iter().map(|&(s, m)| (s as f64, m)).collect(),
                })
                .collect(),
        };
        write_file(
            dir,
            &format!("{name}_mse-{}.svg", slug(&label)),
            &mut files,
            |w| w.write_all(chart.render().as_bytes()),
        )?;
    }
    Ok(RunSummary {
        files,
        rows: Vec::new(),
    })
}
