use std::fs;
use std::path::Path;
use std::process::Command;

use dcrp_harness::output::{read_results_csv, RESULTS_HEADER};

fn dcrp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dcrp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn bad_configs_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let vmf_kmeans = write_config(
        tmp.path(),
        r#"{"experiment": "vmf-sweep",
            "grid": {"alpha": [1.1], "snr": [50], "dim": [3], "dynamics": ["step"], "seeds": [0]},
            "methods": ["dcrp", "kmeans-batch"], "output_dir": "x"}"#,
    );
    assert_eq!(
        dcrp(&["sweep", "--config", &vmf_kmeans]).status.code(),
        Some(2)
    );

    let empty_grid = write_config(
        tmp.path(),
        r#"{"experiment": "gaussian-sweep",
            "grid": {"alpha": [], "dynamics": ["step"], "seeds": [0]},
            "methods": ["dcrp"], "output_dir": "x"}"#,
    );
    assert_eq!(
        dcrp(&["sweep", "--config", &empty_grid]).status.code(),
        Some(2)
    );
    assert_eq!(dcrp(&["sweep", "--workers", "0"]).status.code(), Some(2));
    assert_eq!(
        dcrp(&["sweep", "--experiment", "slam"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dcrp(&["generate", "--experiment", "mc-validation"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dcrp(&["sweep", "--config", "/nonexistent/config.json"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn unwritable_output_exits_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("plain-file");
    fs::write(&file, "").unwrap();
    let out = file.join("sub");
    let status = dcrp(&["slam", "--seed", "0", "--out", out.to_str().unwrap()]).status;
    assert_eq!(status.code(), Some(3));
}

#[test]
fn single_point_sweep_writes_two_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{"experiment": "gaussian-sweep",
                "grid": {{"alpha": [1.1], "snr": [3], "dim": [2], "dynamics": ["hyperbolic"], "seeds": [5]}},
                "methods": ["dcrp", "dpmeans-batch"], "output_dir": {:?}, "n_obs": 200}}"#,
            out.to_str().unwrap()
        ),
    );
    let result = dcrp(&["sweep", "--config", &cfg]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let csv = fs::read_to_string(out.join("gaussian-sweep_results.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), RESULTS_HEADER);
    let rows = read_results_csv(&out.join("gaussian-sweep_results.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r.dynamics == "hyperbolic(scale=10)" && r.seed == 5));
    let jsonl = fs::read_to_string(out.join("gaussian-sweep_results.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 2);
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(first["config"]["dataset"]["n_obs"], 200);
    for fig in ["nmi-vs-alpha", "cluster-ratio", "cluster-count"] {
        assert!(out
            .join(format!("gaussian-sweep_{fig}-hyperbolic-scale-10.svg"))
            .exists());
    }
}

#[test]
fn mc_validation_rows_and_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"experiment": "mc-validation",
            "grid": {"alpha": [1.1, 10.78], "dynamics": ["step", "exponential"], "seeds": [0]},
            "methods": ["dcrp"], "output_dir": "unused", "mc_samples": [20, 200], "mc_steps": 10}"#,
    );
    let mut texts = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = dcrp(&[
            "mc-validate",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ])
        .status;
        assert!(status.success());
        texts.push(fs::read_to_string(out.join("mc-validation_mse.csv")).unwrap());
        let m = fs::read_to_string(out.join("mc-validation_marginals-step-a1.1-s0.csv")).unwrap();
        assert_eq!(m.lines().next().unwrap(), "step,cluster,probability,source");
        // 1 + 2 + ... + 10 entries per source
        assert_eq!(m.lines().count(), 1 + 2 * 55);
    }
    assert_eq!(texts[0], texts[1]);
    // kernels x alphas x sample counts
    assert_eq!(texts[0].lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn slam_outputs_are_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let mut svgs = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let r = dcrp(&["slam", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert!(r.status.success());
        let tag = "dcrp-exponential-tau-10-a1-s3";
        svgs.push(fs::read(out.join(format!("slam_trajectory-{tag}.svg"))).unwrap());
        let labels = fs::read_to_string(out.join(format!("slam_labels-{tag}.csv"))).unwrap();
        let data = fs::read_to_string(out.join("slam_dataset-s3.jsonl")).unwrap();
        assert_eq!(labels.lines().count(), data.lines().count() + 1);
        let env: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("slam_env-s3.json")).unwrap())
                .unwrap();
        let keys: Vec<&String> = env.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["hallways", "landmarks", "rooms", "view_radius"]);
    }
    assert_eq!(svgs[0], svgs[1]);
    assert!(String::from_utf8_lossy(&svgs[0]).contains("<polygon"));
}

#[test]
fn generate_writes_datasets_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    let r = dcrp(&["generate", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert!(r.status.success());
    let names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(!names.is_empty());
    assert!(names
        .iter()
        .all(|n| n.starts_with("gaussian-sweep_dataset-") && n.ends_with(".jsonl")));
    let text = fs::read_to_string(out.join(&names[0])).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["index", "time", "observation", "true_cluster"] {
        assert!(first.get(key).is_some());
    }
}
