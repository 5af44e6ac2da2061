//! Synthetic data: mixtures drawn from the Dynamical CRP generative model and
//! a procedural gridworld with landmark-visibility observations.

mod gridworld;
mod mixture;
mod vmf_sampler;

pub use gridworld::{
    generate_gridworld, simulate_trajectory, trajectory_positions, GridworldEnv, GridworldSpec,
    Hallway, Landmark, Rect, Room, HALLWAY_REGION,
};
pub use mixture::{sample_mixture, MixtureFamily, MixtureSpec};
pub use vmf_sampler::{sample_vmf, sample_vmf_with};

use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};

use crate::likelihood::Observation;

/// One timestamped observation with its ground-truth cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub index: usize,
    pub time: f64,
    pub observation: Observation,
    pub true_cluster: usize,
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write>(mut out: W, records: &[DatasetRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads records written by [`write_jsonl`]; blank lines are skipped.
pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Vec<DatasetRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

/// Relabels so that labels are `1, 2, ...` in order of first appearance.
pub fn first_appearance_labels<T: PartialEq + Clone>(labels: &[T]) -> Vec<usize> {
    let mut seen: Vec<T> = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(i) => i + 1,
            None => {
                seen.push(l.clone());
                seen.len()
            }
        })
        .collect()
}
