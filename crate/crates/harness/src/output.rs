//! Result rows and the files they are written to.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dcrp::TimeKernel;

use crate::{HarnessError, Result};

pub const RESULTS_HEADER: &str =
    "experiment,method,dynamics,alpha,snr,dim,seed,nmi,num_clusters_inferred,num_clusters_true,runtime_ms";

/// One (dataset, method) outcome. `snr` is empty for SLAM and `runtime_ms`
/// is empty when timing is switched off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub method: String,
    pub dynamics: String,
    pub alpha: f64,
    pub snr: Option<f64>,
    pub dim: usize,
    pub seed: u64,
    pub nmi: f64,
    pub num_clusters_inferred: usize,
    pub num_clusters_true: usize,
    pub runtime_ms: Option<f64>,
}

impl ResultRow {
    /// The row with its timing removed, for comparisons across runs.
    pub fn untimed(&self) -> ResultRow {
        ResultRow {
            runtime_ms: None,
            ..self.clone()
        }
    }

    pub fn cluster_ratio(&self) -> f64 {
        self.num_clusters_inferred as f64 / self.num_clusters_true.max(1) as f64
    }
}

/// A row plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    #[serde(flatten)]
    pub row: ResultRow,
    pub config: serde_json::Value,
}

/// `step`, `exponential(tau=10)`, ...
pub fn dynamics_label(kernel: &TimeKernel) -> String {
    match *kernel {
        TimeKernel::Step => "step".into(),
        TimeKernel::Exponential { tau } => format!("exponential(tau={tau})"),
        TimeKernel::Cosine { omega } => format!("cosine(omega={omega})"),
        TimeKernel::Hyperbolic { scale } => format!("hyperbolic(scale={scale})"),
    }
}

/// Lowercase alphanumerics and dots, everything else collapsed to `-`.
pub fn slug(text: &str) -> String {
    let mut out = String::new();
    for c in text.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Creates `dir/name`, hands a buffered writer to `body`, and records the
/// name in `files`.
pub fn write_file<F>(dir: &Path, name: &str, files: &mut Vec<PathBuf>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| HarnessError::io(&path, e))?;
    files.push(PathBuf::from(name));
    Ok(())
}

/// Writes `<experiment>_results.csv` and its JSONL mirror.
pub fn write_results(
    dir: &Path,
    experiment: &str,
    records: &[RunRecord],
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    write_file(dir, &format!("{experiment}_results.csv"), files, |w| {
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        csv.write_record(RESULTS_HEADER.split(','))?;
        for r in records {
            csv.serialize(&r.row)?;
        }
        csv.flush()
    })?;
    write_file(dir, &format!("{experiment}_results.jsonl"), files, |w| {
        for r in records {
            serde_json::to_writer(&mut *w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

/// Reads back a results CSV.
pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| HarnessError::Runtime(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| HarnessError::Runtime(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if headers != RESULTS_HEADER {
        return Err(HarnessError::Runtime(format!(
            "{}: unexpected header {headers}",
            path.display()
        )));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(|e| HarnessError::Runtime(format!("{}: {e}", path.display()))))
        .collect()
}

pub(crate) fn millis(start: std::time::Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(runtime: Option<f64>) -> ResultRow {
        ResultRow {
            experiment: "gaussian-sweep".into(),
            method: "dcrp".into(),
            dynamics: "exponential(tau=10)".into(),
            alpha: 1.1,
            snr: Some(3.0),
            dim: 2,
            seed: 4,
            nmi: 0.5,
            num_clusters_inferred: 3,
            num_clusters_true: 4,
            runtime_ms: runtime,
        }
    }

    #[test]
    fn csv_roundtrip_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let records = vec![
            RunRecord {
                row: row(Some(1.25)),
                config: serde_json::json!({"k": 1}),
            },
            RunRecord {
                row: row(None),
                config: serde_json::Value::Null,
            },
        ];
        let mut files = Vec::new();
        write_results(dir.path(), "gaussian-sweep", &records, &mut files).unwrap();
        let text = fs::read_to_string(dir.path().join("gaussian-sweep_results.csv")).unwrap();
        assert_eq!(text.lines().next().unwrap(), RESULTS_HEADER);
        assert!(text.lines().nth(2).unwrap().ends_with(",4,"));
        let back = read_results_csv(&dir.path().join("gaussian-sweep_results.csv")).unwrap();
        assert_eq!(back, vec![row(Some(1.25)), row(None)]);

        let jsonl = fs::read_to_string(dir.path().join("gaussian-sweep_results.jsonl")).unwrap();
        let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
        assert_eq!(first["config"]["k"], 1);
        assert_eq!(first["nmi"], 0.5);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("exponential(tau=10)"), "exponential-tau-10");
        assert_eq!(slug("cosine(omega=0.1)"), "cosine-omega-0.1");
    }
}
