//! K-fold cross-validation selection of the regularization parameter, the
//! comparison baseline for the closed-form selector.

use ndarray::{Array1, Array2};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};
use crate::solvers::{
    fit_grlasso_logistic_warm, fit_gsrl_linear_warm, lambda_max_gsrl, lambda_max_logistic,
    mean_log_loss, mean_squared_error, sqrt_size_weights, SolverOptions,
};

/// Which estimator the grid search tunes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvModel {
    GsrlLinear,
    GrlassoLogistic,
}

impl CvModel {
    pub fn task(self) -> Task {
        match self {
            CvModel::GsrlLinear => Task::Linear,
            CvModel::GrlassoLogistic => Task::Logistic,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CvResult {
    /// Strictly decreasing grid.
    pub lambda_grid: Vec<f64>,
    /// Held-out losses, one row per retained fold.
    pub fold_losses: Array2<f64>,
    pub mean_loss: Vec<f64>,
    pub best_lambda: f64,
    /// Largest grid value whose mean loss is within one standard error of
    /// the minimum (informational).
    pub one_se_lambda: f64,
    /// Folds actually used (logistic folds whose training split is
    /// single-class are skipped).
    pub k_effective: usize,
    pub warnings: Vec<String>,
}

/// Geometric grid from the smallest all-zero-fit penalty down three
/// decades, `length` points.
pub fn default_grid(data: &Dataset, model: CvModel, length: usize) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(Error::InvalidInput("grid length must be positive".into()));
    }
    let weights = sqrt_size_weights(&data.part);
    let lambda_max = match model {
        CvModel::GsrlLinear => lambda_max_gsrl(data, &weights)?,
        CvModel::GrlassoLogistic => lambda_max_logistic(data, &weights),
    };
    if lambda_max <= 0.0 {
        return Err(Error::DegenerateFit(
            "the penalty threshold is zero; nothing to tune".into(),
        ));
    }
    if length == 1 {
        return Ok(vec![lambda_max]);
    }
    let ratio = 1e-3f64.powf(1.0 / (length as f64 - 1.0));
    let mut grid = Vec::with_capacity(length);
    let mut value = lambda_max;
    for _ in 0..length {
        grid.push(value);
        value *= ratio;
    }
    Ok(grid)
}

/// Seeded K-fold cross-validation over a decreasing grid with warm starts
/// along the path. Held-out loss is the plain task loss: mean squared error
/// or mean log-exponential loss. Ties in the mean loss resolve to the
/// larger penalty.
pub fn cross_validate(
    data: &Dataset,
    model: CvModel,
    k: usize,
    grid: &[f64],
    seed: u64,
) -> Result<CvResult> {
    if model.task() != data.task {
        return Err(Error::InvalidInput(format!(
            "model expects a {} dataset",
            model.task()
        )));
    }
    if k < 2 {
        return Err(Error::InvalidInput("need at least two folds".into()));
    }
    if data.n() < k {
        return Err(Error::InvalidInput(format!(
            "cannot split {} rows into {k} folds",
            data.n()
        )));
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if grid.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::InvalidInput("grid entries must be nonnegative".into()));
    }
    for pair in grid.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidInput(
                "grid must be strictly decreasing".into(),
            ));
        }
    }

    // Balanced seeded folds: shuffle, deal round-robin.
    let n = data.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(seed, streams::CV_FOLDS);
    use rand::Rng;
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (pos, &row) in order.iter().enumerate() {
        folds[pos % k].push(row);
    }

    let opts = SolverOptions::default();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut warnings = Vec::new();

    for (fold_id, holdout) in folds.iter().enumerate() {
        let train_rows: Vec<usize> = (0..n).filter(|i| !holdout.contains(i)).collect();
        let gather = |rows: &[usize]| -> (Array2<f64>, Array1<f64>) {
            let mut x = Array2::zeros((rows.len(), data.d()));
            let mut y = Array1::zeros(rows.len());
            for (slot, &i) in rows.iter().enumerate() {
                x.row_mut(slot).assign(&data.x.row(i));
                y[slot] = data.y[i];
            }
            (x, y)
        };
        let (train_x, train_y) = gather(&train_rows);
        let (val_x, val_y) = gather(holdout);
        if data.task == Task::Logistic {
            let single =
                |y: &Array1<f64>| y.iter().all(|&v| v == 1.0) || y.iter().all(|&v| v == -1.0);
            if single(&train_y) {
                warnings.push(format!(
                    "fold {fold_id}: single-class training split skipped"
                ));
                continue;
            }
        }
        let train = Dataset::new(train_x, train_y, data.part.clone(), data.task)?;

        let mut warm: Option<Array1<f64>> = None;
        let mut losses = Vec::with_capacity(grid.len());
        for &lambda in grid {
            let fit = match model {
                CvModel::GsrlLinear => fit_gsrl_linear_warm(&train, lambda, &opts, warm.as_ref())?,
                CvModel::GrlassoLogistic => {
                    fit_grlasso_logistic_warm(&train, lambda, &opts, warm.as_ref())?
                }
            };
            let loss = match data.task {
                Task::Linear => mean_squared_error(&val_x, &val_y, &fit.beta),
                Task::Logistic => mean_log_loss(&val_x, &val_y, &fit.beta),
            };
            losses.push(loss);
            warm = Some(fit.beta);
        }
        rows.push(losses);
    }

    let k_effective = rows.len();
    if k_effective == 0 {
        return Err(Error::DegenerateFit(
            "every fold was skipped; cannot cross-validate".into(),
        ));
    }
    let mut fold_losses = Array2::zeros((k_effective, grid.len()));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            fold_losses[[i, j]] = *v;
        }
    }
    let mean_loss: Vec<f64> = (0..grid.len())
        .map(|j| fold_losses.column(j).sum() / k_effective as f64)
        .collect();

    // Grid is decreasing, so the first index attaining the minimum is the
    // largest such lambda.
    let mut best_idx = 0;
    for (j, &m) in mean_loss.iter().enumerate() {
        if m < mean_loss[best_idx] {
            best_idx = j;
        }
    }
    let best_lambda = grid[best_idx];
    let se_at_best = {
        let col = fold_losses.column(best_idx);
        let mean = mean_loss[best_idx];
        let var =
            col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k_effective as f64;
        (var / k_effective as f64).sqrt()
    };
    let threshold = mean_loss[best_idx] + se_at_best;
    let one_se_lambda = grid
        .iter()
        .zip(&mean_loss)
        .find(|(_, m)| **m <= threshold)
        .map(|(l, _)| *l)
        .unwrap_or(best_lambda);

    Ok(CvResult {
        lambda_grid: grid.to_vec(),
        fold_losses,
        mean_loss,
        best_lambda,
        one_se_lambda,
        k_effective,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{simulate, SimulationConfig};
    use crate::solvers::{fit_gsrl_linear, fit_gsrl_linear_warm};

    fn small_linear(seed: u64) -> Dataset {
        let mut config = SimulationConfig::new(40, seed, Task::Linear);
        config.n_covariates = 4;
        config.active_groups = vec![1, 3];
        simulate(&config).unwrap().0
    }

    #[test]
    fn singleton_grid_returns_it() {
        let data = small_linear(1);
        let result = cross_validate(&data, CvModel::GsrlLinear, 4, &[0.3], 9).unwrap();
        assert_eq!(result.best_lambda, 0.3);
        assert_eq!(result.k_effective, 4);
    }

    #[test]
    fn duplicate_grid_entries_rejected() {
        let data = small_linear(2);
        assert!(cross_validate(&data, CvModel::GsrlLinear, 4, &[0.3, 0.3], 9).is_err());
        assert!(cross_validate(&data, CvModel::GsrlLinear, 4, &[0.1, 0.3], 9).is_err());
    }

    #[test]
    fn grid_head_zeroes_every_fit() {
        let data = small_linear(3);
        let grid = default_grid(&data, CvModel::GsrlLinear, 8).unwrap();
        // Geometric with constant ratio.
        let ratio = grid[1] / grid[0];
        for pair in grid.windows(2) {
            assert!((pair[1] / pair[0] - ratio).abs() < 1e-12);
        }
        assert!((grid.last().unwrap() / grid[0] - 1e-3).abs() < 1e-12);
        let fit = fit_gsrl_linear(&data, grid[0], &SolverOptions::default()).unwrap();
        assert!(fit.beta.iter().all(|b| *b == 0.0));
        assert_eq!(default_grid(&data, CvModel::GsrlLinear, 1).unwrap().len(), 1);
    }

    #[test]
    fn folds_are_balanced_and_reproducible() {
        let data = small_linear(4);
        let grid = default_grid(&data, CvModel::GsrlLinear, 5).unwrap();
        let a = cross_validate(&data, CvModel::GsrlLinear, 7, &grid, 11).unwrap();
        let b = cross_validate(&data, CvModel::GsrlLinear, 7, &grid, 11).unwrap();
        assert_eq!(a.fold_losses, b.fold_losses);
        assert_eq!(a.best_lambda, b.best_lambda);
        // Mean loss recomputable from the fold matrix.
        for (j, m) in a.mean_loss.iter().enumerate() {
            let col = a.fold_losses.column(j);
            assert!((col.sum() / a.k_effective as f64 - m).abs() < 1e-12);
        }
    }

    #[test]
    fn warm_start_does_not_move_the_minimizer() {
        let data = small_linear(5);
        let grid = default_grid(&data, CvModel::GsrlLinear, 12).unwrap();
        let result = cross_validate(&data, CvModel::GsrlLinear, 5, &grid, 3).unwrap();
        // Cold refit at the selected lambda reproduces the warm-started
        // objective.
        let opts = SolverOptions::default();
        let cold = fit_gsrl_linear(&data, result.best_lambda, &opts).unwrap();
        let warmish = fit_gsrl_linear_warm(&data, result.best_lambda, &opts, Some(&cold.beta)).unwrap();
        assert!((cold.objective - warmish.objective).abs() < 1e-6);
    }

    #[test]
    fn logistic_single_class_fold_is_skipped() {
        // 10 rows, 9 positive, 1 negative; with 5 folds some validation
        // splits are single-class.
        let part = crate::norm::GroupPartition::singletons(2);
        let x = Array2::from_shape_fn((10, 2), |(i, j)| ((i * 3 + j) as f64 * 0.37).sin());
        let mut y = Array1::from_elem(10, 1.0);
        y[0] = -1.0;
        let data = Dataset::new(x, y, part, Task::Logistic).unwrap();
        let result = cross_validate(&data, CvModel::GrlassoLogistic, 5, &[0.1, 0.01], 2).unwrap();
        assert!(result.k_effective < 5);
        assert!(!result.warnings.is_empty());
    }
}
