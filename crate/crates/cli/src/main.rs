//! `gdro` — groupwise distributionally robust regression from the command
//! line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gdro::cv::{cross_validate, default_grid, CvModel};
use gdro::data::{save_dataset_csv, save_groups, simulate, SimulationConfig};
use gdro::rwpi::select_lambda;
use gdro::solvers::{
    fit_grlasso_logistic_weighted, fit_gsrl_linear_weighted, ModelFit, SolverOptions,
};
use gdro::{Error, Result, Task};
use gdro_cli::experiment::{
    rows_to_csv, rows_to_table, run_experiment, ExperimentConfig,
};
use gdro_cli::io::{load_dataset, write_beta_csv, LoadedData};
use gdro_cli::exit_code_for;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "gdro",
    about = "Groupwise distributionally robust regression toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Predictor/response CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Partition sidecar JSON: {"groups": [[1,2,3], ...]} (1-based).
    #[arg(long)]
    groups: PathBuf,
    /// Task: linear or logistic.
    #[arg(long)]
    task: String,
    /// Response column name.
    #[arg(long, default_value = "y")]
    response: String,
    /// Label mapped to +1 for categorical logistic responses.
    #[arg(long)]
    positive_label: Option<String>,
    /// Append an unpenalized constant column.
    #[arg(long)]
    intercept: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a penalized model; lambda comes from --lambda or --rwpi.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        lambda: Option<f64>,
        /// Select lambda by the closed-form quantile recipe first.
        #[arg(long)]
        rwpi: bool,
        #[arg(long, default_value_t = 0.05)]
        chi: f64,
        #[arg(long, default_value_t = 100_000)]
        mc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for beta.csv and fit.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute the closed-form regularization parameter.
    SelectLambda {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0.05)]
        chi: f64,
        #[arg(long, default_value_t = 100_000)]
        mc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional output directory for selection.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// K-fold cross-validation over a geometric grid.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 50)]
        grid_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for cv_losses.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a dataset from the simulation design.
    Simulate {
        #[arg(long)]
        task: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        covariates: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        noise_sd: f64,
        /// Output directory for data.csv, groups.json, beta_star.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the seeded duality, norm, and dominance check suites.
    VerifyDuality {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trimmed suite that finishes in a few seconds.
        #[arg(long)]
        quick: bool,
    },
    /// Reproduce the simulation comparison tables at configurable scale.
    Experiment {
        /// JSON config; flags override individual fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        task: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        chi: Option<f64>,
        /// Restore the full 200-replication scale.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated training sizes, e.g. 50,500.
        #[arg(long)]
        sizes: Option<String>,
    },
}

#[derive(Serialize)]
struct FitReport {
    task: String,
    lambda: f64,
    objective: f64,
    sigma_hat: Option<f64>,
    iterations: usize,
    converged: bool,
    intercept: bool,
}

#[derive(Serialize)]
struct SelectionReport {
    lambda: f64,
    eta_hat: f64,
    chi: f64,
    n_mc: usize,
    seed: u64,
    moment_ratio: Option<f64>,
}

fn fit_model(loaded: &LoadedData, lambda: f64) -> Result<ModelFit> {
    let opts = SolverOptions::default();
    match loaded.data.task {
        Task::Linear => {
            fit_gsrl_linear_weighted(&loaded.data, lambda, &loaded.weights, &opts, None)
        }
        Task::Logistic => {
            fit_grlasso_logistic_weighted(&loaded.data, lambda, &loaded.weights, &opts, None)
        }
    }
}

/// Selection runs on the dataset without the intercept column appended.
fn selection_for(args: &DataArgs, chi: f64, mc: usize, seed: u64) -> Result<gdro::rwpi::RwpiSelection> {
    let task: Task = args.task.parse()?;
    let raw = load_dataset(
        &args.data,
        &args.groups,
        task,
        &args.response,
        args.positive_label.as_deref(),
        false,
    )?;
    select_lambda(&raw.data, chi, mc, seed)
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Fit {
            data: data_args,
            lambda,
            rwpi,
            chi,
            mc,
            seed,
            out,
        } => {
            let task: Task = data_args.task.parse()?;
            let lambda = match (lambda, rwpi) {
                (Some(_), true) => {
                    return Err(Error::InvalidInput(
                        "--lambda and --rwpi are mutually exclusive".into(),
                    ))
                }
                (Some(l), false) if l >= 0.0 => l,
                (Some(l), false) => {
                    return Err(Error::InvalidInput(format!("negative lambda {l}")))
                }
                (None, true) => selection_for(&data_args, chi, mc, seed)?.lambda,
                (None, false) => {
                    return Err(Error::InvalidInput(
                        "pass --lambda <value> or --rwpi".into(),
                    ))
                }
            };
            let loaded = load_dataset(
                &data_args.data,
                &data_args.groups,
                task,
                &data_args.response,
                data_args.positive_label.as_deref(),
                data_args.intercept,
            )?;
            let fit = fit_model(&loaded, lambda)?;
            std::fs::create_dir_all(&out)?;
            write_beta_csv(&out.join("beta.csv"), &fit.beta, &loaded.data.part)?;
            let report = FitReport {
                task: task.to_string(),
                lambda,
                objective: fit.objective,
                sigma_hat: fit.sigma_hat,
                iterations: fit.iterations,
                converged: fit.converged,
                intercept: loaded.has_intercept,
            };
            std::fs::write(
                out.join("fit.json"),
                serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::InvalidInput(e.to_string()))?,
            )?;
            println!(
                "lambda = {lambda}\nobjective = {}\niterations = {}\nconverged = {}",
                fit.objective, fit.iterations, fit.converged
            );
            if let Some(sigma) = fit.sigma_hat {
                println!("sigma_hat = {sigma}");
            }
            Ok(if fit.converged { 0 } else { 3 })
        }
        Command::SelectLambda {
            data: data_args,
            chi,
            mc,
            seed,
            out,
        } => {
            let selection = selection_for(&data_args, chi, mc, seed)?;
            let report = SelectionReport {
                lambda: selection.lambda,
                eta_hat: selection.eta_hat,
                chi: selection.chi,
                n_mc: selection.n_mc,
                seed: selection.seed,
                moment_ratio: selection.moment_ratio,
            };
            println!("lambda = {}", selection.lambda);
            println!("eta_hat = {}", selection.eta_hat);
            if let Some(ratio) = selection.moment_ratio {
                println!("moment_ratio = {ratio}");
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(
                    dir.join("selection.json"),
                    serde_json::to_string_pretty(&report)
                        .map_err(|e| Error::InvalidInput(e.to_string()))?,
                )?;
            }
            Ok(0)
        }
        Command::Cv {
            data: data_args,
            folds,
            grid_len,
            seed,
            out,
        } => {
            let task: Task = data_args.task.parse()?;
            let loaded = load_dataset(
                &data_args.data,
                &data_args.groups,
                task,
                &data_args.response,
                data_args.positive_label.as_deref(),
                false,
            )?;
            let model = match task {
                Task::Linear => CvModel::GsrlLinear,
                Task::Logistic => CvModel::GrlassoLogistic,
            };
            let grid = default_grid(&loaded.data, model, grid_len)?;
            let result = cross_validate(&loaded.data, model, folds, &grid, seed)?;
            println!("best_lambda = {}", result.best_lambda);
            println!("one_se_lambda = {}", result.one_se_lambda);
            println!("k_effective = {}", result.k_effective);
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let mut text = String::from("fold");
                for l in &result.lambda_grid {
                    text.push_str(&format!(",{l}"));
                }
                text.push('\n');
                for i in 0..result.k_effective {
                    text.push_str(&i.to_string());
                    for j in 0..result.lambda_grid.len() {
                        text.push_str(&format!(",{}", result.fold_losses[[i, j]]));
                    }
                    text.push('\n');
                }
                std::fs::write(dir.join("cv_losses.csv"), text)?;
            }
            Ok(0)
        }
        Command::Simulate {
            task,
            n,
            seed,
            covariates,
            degree,
            noise_sd,
            out,
        } => {
            let task: Task = task.parse()?;
            let mut config = SimulationConfig::new(n, seed, task);
            config.n_covariates = covariates;
            config.degree = degree;
            config.noise_sd = noise_sd;
            let (data, beta_star) = simulate(&config)?;
            std::fs::create_dir_all(&out)?;
            save_dataset_csv(&data, &out.join("data.csv"))?;
            save_groups(&data.part, &out.join("groups.json"))?;
            let mut text = String::from("index,value\n");
            for (i, b) in beta_star.iter().enumerate() {
                text.push_str(&format!("{},{b}\n", i + 1));
            }
            std::fs::write(out.join("beta_star.csv"), text)?;
            println!(
                "wrote {} rows x {} predictors ({} groups) under {}",
                data.n(),
                data.d(),
                data.part.group_count(),
                out.display()
            );
            Ok(0)
        }
        Command::VerifyDuality { seed, quick } => {
            let reports = gdro::verify::run_all(seed, quick);
            let mut all_ok = true;
            for r in &reports {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                all_ok &= r.passed;
            }
            Ok(if all_ok { 0 } else { 1 })
        }
        Command::Experiment {
            config,
            task,
            seed,
            reps,
            mc,
            folds,
            chi,
            full,
            out,
            sizes,
        } => {
            let mut cfg: ExperimentConfig = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
                }
                None => ExperimentConfig::default(),
            };
            if let Some(task) = task {
                cfg.task = task;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(reps) = reps {
                cfg.replications = reps;
            }
            if full {
                cfg.replications = 200;
            }
            if let Some(mc) = mc {
                cfg.n_mc = mc;
            }
            if let Some(folds) = folds {
                cfg.cv_folds = folds;
            }
            if let Some(chi) = chi {
                cfg.chi = chi;
            }
            if let Some(out) = out {
                cfg.out_dir = Some(out);
            }
            if let Some(sizes) = sizes {
                let parsed: std::result::Result<Vec<usize>, _> =
                    sizes.split(',').map(|t| t.trim().parse()).collect();
                cfg.sample_sizes = parsed
                    .map_err(|_| Error::InvalidInput(format!("bad --sizes '{sizes}'")))?;
            }
            let task = cfg.task_kind()?;
            let outcome = run_experiment(&cfg, true)?;
            let csv = rows_to_csv(&outcome.rows);
            print!("{}", rows_to_table(&outcome.rows, task));
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("results.csv"), &csv)?;
                println!("results written to {}", dir.join("results.csv").display());
            } else {
                print!("{csv}");
            }
            if outcome.failed_replications * 10 > outcome.total_replications {
                eprintln!(
                    "{} of {} replications failed",
                    outcome.failed_replications, outcome.total_replications
                );
                return Ok(3);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
