//! Replicated simulation experiments comparing the closed-form selector,
//! cross-validation, and an unpenalized fit across sample sizes.
//!
//! Each replication draws fresh active coefficients, a training set, and an
//! independent test set from the same process (same coefficients), then
//! records plain train/test losses for every method. Replications run in
//! parallel over independent seeded streams; assembly is ordered by
//! replication index, so output is deterministic.

use std::path::PathBuf;

use gdro::cv::{cross_validate, default_grid, CvModel};
use gdro::data::{simulate, BetaDraw, SimulationConfig};
use gdro::linalg::least_squares;
use gdro::rwpi::select_lambda;
use gdro::solvers::{
    fit_grlasso_logistic, fit_gsrl_linear, mean_log_loss, mean_squared_error, SolverOptions,
};
use gdro::{Dataset, Error, Result, Task};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub task: String,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub chi: f64,
    pub n_mc: usize,
    pub cv_folds: usize,
    pub cv_grid_len: usize,
    /// Fresh test rows per replication, scaled by `test_scale`.
    pub test_n: usize,
    pub test_scale: f64,
    pub seed: u64,
    pub covariates: usize,
    pub degree: usize,
    pub noise_sd: f64,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: "linear".into(),
            sample_sizes: vec![50, 100, 500, 1000],
            replications: 20,
            chi: 0.05,
            n_mc: 100_000,
            cv_folds: 5,
            cv_grid_len: 50,
            test_n: 1000,
            test_scale: 1.0,
            seed: 0,
            covariates: 16,
            degree: 3,
            noise_sd: 1.0,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn task_kind(&self) -> Result<Task> {
        self.task.parse()
    }

    fn scaled_test_n(&self) -> usize {
        ((self.test_n as f64 * self.test_scale).round() as usize).max(10)
    }
}

/// One method's loss summary at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub method: String,
    pub n: usize,
    pub train_mean: f64,
    pub train_sd: f64,
    pub test_mean: f64,
    pub test_sd: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rows: Vec<MethodStats>,
    pub failed_replications: usize,
    pub total_replications: usize,
}

struct RepLosses {
    rwpi: (f64, f64),
    cv: (f64, f64),
    plain: (f64, f64),
}

/// splitmix64 over a word sequence; decorrelates the per-replication
/// simulation seeds.
fn mix_seed(words: &[u64]) -> u64 {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    for &w in words {
        state = state.wrapping_add(w).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        state ^= state >> 27;
        state = state.wrapping_mul(0x94D0_49BB_1331_11EB);
        state ^= state >> 31;
    }
    state
}

fn loss(task: Task, data: &Dataset, beta: &ndarray::Array1<f64>) -> f64 {
    match task {
        Task::Linear => mean_squared_error(&data.x, &data.y, beta),
        Task::Logistic => mean_log_loss(&data.x, &data.y, beta),
    }
}

fn run_replication(config: &ExperimentConfig, n: usize, rep: usize) -> Result<RepLosses> {
    let task = config.task_kind()?;
    let mut train_cfg = SimulationConfig::new(n, mix_seed(&[config.seed, n as u64, rep as u64, 0]), task);
    train_cfg.n_covariates = config.covariates;
    train_cfg.degree = config.degree;
    train_cfg.noise_sd = config.noise_sd;
    let (train, beta_star) = simulate(&train_cfg)?;

    // Fresh test set from the same process: same coefficients, new draws.
    let mut active_coeffs = Vec::new();
    let mut sorted_active = train_cfg.active_groups.clone();
    sorted_active.sort_unstable();
    for &g in &sorted_active {
        for k in 0..config.degree {
            active_coeffs.push(beta_star[(g - 1) * config.degree + k]);
        }
    }
    let mut test_cfg = train_cfg.clone();
    test_cfg.n = config.scaled_test_n();
    test_cfg.seed = mix_seed(&[config.seed, n as u64, rep as u64, 1]);
    test_cfg.beta_draw = BetaDraw::Fixed(active_coeffs);
    let (test, _) = simulate(&test_cfg)?;

    let opts = SolverOptions::default();
    let fit_at = |lambda: f64| -> Result<ndarray::Array1<f64>> {
        Ok(match task {
            Task::Linear => fit_gsrl_linear(&train, lambda, &opts)?.beta,
            Task::Logistic => fit_grlasso_logistic(&train, lambda, &opts)?.beta,
        })
    };

    let selection = select_lambda(
        &train,
        config.chi,
        config.n_mc,
        mix_seed(&[config.seed, n as u64, rep as u64, 2]),
    )?;
    let rwpi_beta = fit_at(selection.lambda)?;

    let model = match task {
        Task::Linear => CvModel::GsrlLinear,
        Task::Logistic => CvModel::GrlassoLogistic,
    };
    let grid = default_grid(&train, model, config.cv_grid_len)?;
    let cv = cross_validate(
        &train,
        model,
        config.cv_folds,
        &grid,
        mix_seed(&[config.seed, n as u64, rep as u64, 3]),
    )?;
    let cv_beta = fit_at(cv.best_lambda)?;

    // Unpenalized reference: least squares, or logistic at lambda zero
    // with a capped iteration budget (it diverges on separable data, which
    // is the point of the comparison).
    let plain_beta = match task {
        Task::Linear => least_squares(&train.x, &train.y)?,
        Task::Logistic => {
            let capped = SolverOptions {
                max_iter: 500,
                ..SolverOptions::default()
            };
            fit_grlasso_logistic(&train, 0.0, &capped)?.beta
        }
    };

    Ok(RepLosses {
        rwpi: (loss(task, &train, &rwpi_beta), loss(task, &test, &rwpi_beta)),
        cv: (loss(task, &train, &cv_beta), loss(task, &test, &cv_beta)),
        plain: (loss(task, &train, &plain_beta), loss(task, &test, &plain_beta)),
    })
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, var.sqrt())
}

pub fn method_names(task: Task) -> [&'static str; 3] {
    match task {
        Task::Linear => ["rwpi-gsrl", "cv-gsrl", "ols"],
        Task::Logistic => ["rwpi-grlasso", "cv-grlasso", "logistic"],
    }
}

/// Runs every (sample size, replication) cell in parallel and aggregates
/// mean ± sd per method. Per-replication failures are recorded and skipped.
pub fn run_experiment(config: &ExperimentConfig, log: bool) -> Result<ExperimentOutcome> {
    let task = config.task_kind()?;
    if config.replications == 0 {
        return Err(Error::InvalidInput("need at least one replication".into()));
    }
    let names = method_names(task);
    let mut rows = Vec::new();
    let mut failed = 0usize;
    for &n in &config.sample_sizes {
        let results: Vec<Result<RepLosses>> = (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                let out = run_replication(config, n, rep);
                if log {
                    match &out {
                        Ok(_) => eprintln!("n={n} replication {rep}: ok"),
                        Err(e) => eprintln!("n={n} replication {rep}: FAILED ({e})"),
                    }
                }
                out
            })
            .collect();
        let ok: Vec<&RepLosses> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
        failed += results.len() - ok.len();
        if ok.is_empty() {
            return Err(Error::Numerical(format!(
                "every replication failed at n = {n}"
            )));
        }
        let columns: [fn(&RepLosses) -> (f64, f64); 3] =
            [|r| r.rwpi, |r| r.cv, |r| r.plain];
        for (method, extract) in names.iter().zip(columns.iter()) {
            let train: Vec<f64> = ok.iter().map(|r| extract(r).0).collect();
            let test: Vec<f64> = ok.iter().map(|r| extract(r).1).collect();
            let (train_mean, train_sd) = mean_sd(&train);
            let (test_mean, test_sd) = mean_sd(&test);
            rows.push(MethodStats {
                method: method.to_string(),
                n,
                train_mean,
                train_sd,
                test_mean,
                test_sd,
            });
        }
    }
    Ok(ExperimentOutcome {
        rows,
        failed_replications: failed,
        total_replications: config.replications * config.sample_sizes.len(),
    })
}

/// CSV with the fixed schema
/// `method,n,train_mean,train_sd,test_mean,test_sd`. Values print in
/// shortest round-trip form, so parsing the file reproduces them exactly.
pub fn rows_to_csv(rows: &[MethodStats]) -> String {
    let mut out = String::from("method,n,train_mean,train_sd,test_mean,test_sd\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method, r.n, r.train_mean, r.train_sd, r.test_mean, r.test_sd
        ));
    }
    out
}

pub fn parse_rows_csv(text: &str) -> Result<Vec<MethodStats>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Csv(format!("line {}: expected 6 fields", i + 1)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Csv(format!("line {}: bad number '{s}'", i + 1)))
        };
        rows.push(MethodStats {
            method: fields[0].to_string(),
            n: fields[1]
                .parse()
                .map_err(|_| Error::Csv(format!("line {}: bad n", i + 1)))?,
            train_mean: parse(fields[2])?,
            train_sd: parse(fields[3])?,
            test_mean: parse(fields[4])?,
            test_sd: parse(fields[5])?,
        });
    }
    Ok(rows)
}

/// Aligned text table: one row per sample size, training/testing pairs per
/// method.
pub fn rows_to_table(rows: &[MethodStats], task: Task) -> String {
    let names = method_names(task);
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    let mut out = String::new();
    out.push_str(&format!("{:>8}", "n"));
    for name in names {
        out.push_str(&format!("  {:>24}", format!("{name} train/test")));
    }
    out.push('\n');
    for n in sizes {
        out.push_str(&format!("{n:>8}"));
        for name in names {
            let row = rows
                .iter()
                .find(|r| r.n == n && r.method == name)
                .expect("aggregated row");
            out.push_str(&format!(
                "  {:>24}",
                format!(
                    "{:.3}±{:.3} / {:.3}±{:.3}",
                    row.train_mean, row.train_sd, row.test_mean, row.test_sd
                )
            ));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(task: &str) -> ExperimentConfig {
        ExperimentConfig {
            task: task.into(),
            sample_sizes: vec![40],
            replications: 2,
            n_mc: 2000,
            cv_grid_len: 8,
            test_n: 100,
            covariates: 8,
            seed: 5,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn deterministic_and_csv_roundtrips() {
        let config = tiny_config("linear");
        let a = run_experiment(&config, false).unwrap();
        let b = run_experiment(&config, false).unwrap();
        let csv_a = rows_to_csv(&a.rows);
        let csv_b = rows_to_csv(&b.rows);
        assert_eq!(csv_a, csv_b);
        let parsed = parse_rows_csv(&csv_a).unwrap();
        assert_eq!(parsed, a.rows);
        assert_eq!(a.rows.len(), 3);
        assert_eq!(a.failed_replications, 0);
    }

    #[test]
    fn logistic_experiment_runs() {
        let mut config = tiny_config("logistic");
        config.sample_sizes = vec![60];
        let out = run_experiment(&config, false).unwrap();
        assert_eq!(out.rows.len(), 3);
        let table = rows_to_table(&out.rows, Task::Logistic);
        assert!(table.contains("rwpi-grlasso"));
    }
}
