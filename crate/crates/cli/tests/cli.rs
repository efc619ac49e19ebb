//! End-to-end tests of the `gdro` binary: exit codes, file outputs, flag
//! composition, and reproducibility.

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn gdro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdro"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn simulate_into(dir: &Path, task: &str, n: usize, seed: u64) {
    let out = gdro(&[
        "simulate",
        "--task",
        task,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--covariates",
        "6",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_writes_dataset_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "linear", 30, 7);
    assert!(dir.path().join("data.csv").exists());
    assert!(dir.path().join("groups.json").exists());
    assert!(dir.path().join("beta_star.csv").exists());
    // Same seed, same bytes.
    let first = std::fs::read(dir.path().join("data.csv")).unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    simulate_into(dir2.path(), "linear", 30, 7);
    let second = std::fs::read(dir2.path().join("data.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn fit_missing_sidecar_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "linear", 25, 1);
    let out = gdro(&[
        "fit",
        "--data",
        dir.path().join("data.csv").to_str().unwrap(),
        "--groups",
        dir.path().join("nope.json").to_str().unwrap(),
        "--task",
        "linear",
        "--lambda",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn huge_lambda_zeroes_every_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "linear", 25, 2);
    let out_dir = dir.path().join("fit");
    let out = gdro(&[
        "fit",
        "--data",
        dir.path().join("data.csv").to_str().unwrap(),
        "--groups",
        dir.path().join("groups.json").to_str().unwrap(),
        "--task",
        "linear",
        "--lambda",
        "1e9",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let beta = std::fs::read_to_string(out_dir.join("beta.csv")).unwrap();
    for line in beta.lines().skip(1) {
        let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(value, 0.0);
    }
}

#[test]
fn rwpi_flag_composes_select_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "linear", 40, 3);
    let data = dir.path().join("data.csv");
    let groups = dir.path().join("groups.json");
    let sel_dir = dir.path().join("sel");
    let out = gdro(&[
        "select-lambda",
        "--data",
        data.to_str().unwrap(),
        "--groups",
        groups.to_str().unwrap(),
        "--task",
        "linear",
        "--mc",
        "4000",
        "--seed",
        "11",
        "--out",
        sel_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let selection: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sel_dir.join("selection.json")).unwrap())
            .unwrap();
    let lambda = selection["lambda"].as_f64().unwrap();
    assert!(lambda > 0.0);

    let via_rwpi = dir.path().join("fit_rwpi");
    let out = gdro(&[
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--groups",
        groups.to_str().unwrap(),
        "--task",
        "linear",
        "--rwpi",
        "--mc",
        "4000",
        "--seed",
        "11",
        "--out",
        via_rwpi.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let via_lambda = dir.path().join("fit_lambda");
    let out = gdro(&[
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--groups",
        groups.to_str().unwrap(),
        "--task",
        "linear",
        "--lambda",
        &format!("{lambda}"),
        "--out",
        via_lambda.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let a = std::fs::read(via_rwpi.join("beta.csv")).unwrap();
    let b = std::fs::read(via_lambda.join("beta.csv")).unwrap();
    assert_eq!(a, b, "--rwpi must equal select-lambda followed by fit");
}

#[test]
fn lambda_and_rwpi_conflict() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "linear", 25, 4);
    let out = gdro(&[
        "fit",
        "--data",
        dir.path().join("data.csv").to_str().unwrap(),
        "--groups",
        dir.path().join("groups.json").to_str().unwrap(),
        "--task",
        "linear",
        "--lambda",
        "0.1",
        "--rwpi",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cv_writes_loss_matrix() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "linear", 40, 5);
    let cv_dir = dir.path().join("cv");
    let out = gdro(&[
        "cv",
        "--data",
        dir.path().join("data.csv").to_str().unwrap(),
        "--groups",
        dir.path().join("groups.json").to_str().unwrap(),
        "--task",
        "linear",
        "--folds",
        "4",
        "--grid-len",
        "6",
        "--seed",
        "9",
        "--out",
        cv_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(cv_dir.join("cv_losses.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header + one row per fold");
    assert_eq!(lines[0].split(',').count(), 7, "fold column + 6 lambdas");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("best_lambda"));
}

#[test]
fn verify_quick_passes_within_budget() {
    let start = Instant::now();
    let out = gdro(&["verify-duality", "--quick", "--seed", "0"]);
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!stdout.contains("FAIL"));
    assert!(elapsed.as_secs_f64() < 10.0, "quick suite took {elapsed:?}");
}

#[test]
fn experiment_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "task": "linear",
        "sample_sizes": [30],
        "replications": 2,
        "n_mc": 2000,
        "cv_grid_len": 6,
        "test_n": 50,
        "covariates": 6,
        "seed": 13
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let run = |out: &Path| {
        let res = gdro(&[
            "experiment",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        std::fs::read(out.join("results.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"));
    let b = run(&dir.path().join("b"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("method,n,train_mean,train_sd,test_mean,test_sd"));
    assert_eq!(text.lines().count(), 4, "header + three methods");
}
