//! Simulation designs, polynomial group expansion, CSV ingestion, and
//! train/test splitting.
//!
//! The simulated design: latent variables `Z_1..Z_m` and a shared `W`, all
//! independent standard normal, give equicorrelated covariates
//! `C_j = (Z_j + W) / sqrt(2)`; each covariate contributes its powers
//! `1..degree` as one predictor group. The response depends on a small set
//! of active groups, linearly with additive Gaussian noise or through a
//! Bernoulli draw on the logistic link.

use std::io::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::norm::GroupPartition;
use crate::rng::{stream_rng, streams};

/// How the active coefficients are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaDraw {
    /// Independent standard normal coefficients, redrawn per seed.
    StandardNormal,
    /// Explicit coefficients, one per active (group, power) slot in group
    /// order then power order.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub n: usize,
    pub seed: u64,
    pub task: Task,
    pub n_covariates: usize,
    pub degree: usize,
    /// 1-based covariate indices whose groups carry signal.
    pub active_groups: Vec<usize>,
    pub beta_draw: BetaDraw,
    /// Standard deviation of the additive error (linear task).
    pub noise_sd: f64,
}

impl SimulationConfig {
    pub fn new(n: usize, seed: u64, task: Task) -> Self {
        SimulationConfig {
            n,
            seed,
            task,
            n_covariates: 16,
            degree: 3,
            active_groups: vec![3, 5],
            beta_draw: BetaDraw::StandardNormal,
            noise_sd: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if self.degree == 0 {
            return Err(Error::InvalidInput("degree must be at least 1".into()));
        }
        if self.n_covariates == 0 {
            return Err(Error::InvalidInput("need at least one covariate".into()));
        }
        if self
            .active_groups
            .iter()
            .any(|&g| g == 0 || g > self.n_covariates)
        {
            return Err(Error::InvalidInput(format!(
                "active groups must lie in 1..={}",
                self.n_covariates
            )));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidInput("noise_sd must be nonnegative".into()));
        }
        if let BetaDraw::Fixed(c) = &self.beta_draw {
            if c.len() != self.active_groups.len() * self.degree {
                return Err(Error::InvalidInput(format!(
                    "fixed coefficients need {} entries",
                    self.active_groups.len() * self.degree
                )));
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.n_covariates * self.degree
    }
}

/// Draws a dataset from the design along with the true coefficient vector.
///
/// Draw order (fixed for reproducibility): active coefficients in group
/// then power order, then per row `Z_1..Z_m`, `W`, and the response noise
/// (linear) or the Bernoulli uniform (logistic).
pub fn simulate(config: &SimulationConfig) -> Result<(Dataset, Array1<f64>)> {
    config.validate()?;
    let m = config.n_covariates;
    let degree = config.degree;
    let d = config.d();
    let part = GroupPartition::contiguous(&vec![degree; m])?;
    let mut rng = stream_rng(config.seed, streams::SIMULATE);

    let mut beta_star = Array1::<f64>::zeros(d);
    let mut coeffs = Vec::with_capacity(config.active_groups.len() * degree);
    match &config.beta_draw {
        BetaDraw::StandardNormal => {
            for _ in 0..config.active_groups.len() * degree {
                coeffs.push(rng.sample::<f64, _>(StandardNormal));
            }
        }
        BetaDraw::Fixed(c) => coeffs.extend_from_slice(c),
    }
    let mut sorted_active = config.active_groups.clone();
    sorted_active.sort_unstable();
    sorted_active.dedup();
    for (slot, &g) in sorted_active.iter().enumerate() {
        for k in 0..degree {
            beta_star[(g - 1) * degree + k] = coeffs[slot * degree + k];
        }
    }

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut x = Array2::<f64>::zeros((config.n, d));
    let mut y = Array1::<f64>::zeros(config.n);
    for i in 0..config.n {
        let mut covariates = vec![0.0; m];
        for c in covariates.iter_mut() {
            *c = rng.sample::<f64, _>(StandardNormal);
        }
        let w: f64 = rng.sample(StandardNormal);
        let mut eta = 0.0;
        for (j, z) in covariates.iter().enumerate() {
            let c = (z + w) * inv_sqrt2;
            let mut power = 1.0;
            for k in 0..degree {
                power *= c;
                x[[i, j * degree + k]] = power;
                eta += beta_star[j * degree + k] * power;
            }
        }
        y[i] = match config.task {
            Task::Linear => eta + config.noise_sd * rng.sample::<f64, _>(StandardNormal),
            Task::Logistic => {
                let p = 1.0 / (1.0 + (-eta).exp());
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    -1.0
                }
            }
        };
    }
    let data = Dataset::new(x, y, part, config.task)?;
    Ok((data, beta_star))
}

/// Expands each column of `raw` into its powers `1..=degree`, grouping the
/// powers of one source column together.
pub fn polynomial_group_expand(
    raw: &Array2<f64>,
    degree: usize,
) -> Result<(Array2<f64>, GroupPartition)> {
    if degree == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let (n, m) = raw.dim();
    if m == 0 {
        return Err(Error::InvalidInput("no columns to expand".into()));
    }
    let mut out = Array2::<f64>::zeros((n, m * degree));
    for i in 0..n {
        for j in 0..m {
            let mut power = 1.0;
            for k in 0..degree {
                power *= raw[[i, j]];
                out[[i, j * degree + k]] = power;
            }
        }
    }
    let part = GroupPartition::contiguous(&vec![degree; m])?;
    Ok((out, part))
}

/// A raw numeric table read from CSV.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub predictors: Array2<f64>,
    pub response: Array1<f64>,
    pub predictor_names: Vec<String>,
}

/// Reads a headered CSV, taking `response_column` as the response and every
/// other column as a predictor. Numeric parsing is strict decimal. For
/// categorical responses pass `positive_label`: matching cells map to `+1`,
/// anything else must equal some single other label and maps to `-1`.
pub fn load_csv(
    path: &Path,
    response_column: &str,
    positive_label: Option<&str>,
) -> Result<CsvTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .clone();
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::Csv(format!("no column named '{response_column}'")))?;
    let predictor_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != response_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut response = Vec::new();
    let mut negative_label: Option<String> = None;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(format!("row {}: {e}", line + 2)))?;
        if record.len() != headers.len() {
            return Err(Error::Csv(format!(
                "row {}: {} fields, expected {}",
                line + 2,
                record.len(),
                headers.len()
            )));
        }
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (col, field) in record.iter().enumerate() {
            if col == response_idx {
                match positive_label {
                    Some(pos) => {
                        if field == pos {
                            response.push(1.0);
                        } else {
                            match &negative_label {
                                Some(neg) if neg == field => response.push(-1.0),
                                Some(neg) => {
                                    return Err(Error::Csv(format!(
                                        "row {}: label '{field}' after seeing '{pos}'/'{neg}'",
                                        line + 2
                                    )))
                                }
                                None => {
                                    negative_label = Some(field.to_string());
                                    response.push(-1.0);
                                }
                            }
                        }
                    }
                    None => response.push(parse_cell(field, line, &headers[col])?),
                }
            } else {
                row.push(parse_cell(field, line, &headers[col])?);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv("no data rows".into()));
    }
    let n = rows.len();
    let m = rows[0].len();
    let mut predictors = Array2::<f64>::zeros((n, m));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            predictors[[i, j]] = *v;
        }
    }
    Ok(CsvTable {
        predictors,
        response: Array1::from(response),
        predictor_names,
    })
}

fn parse_cell(field: &str, line: usize, column: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| {
        Error::Csv(format!(
            "row {}, column '{column}': '{field}' is not numeric",
            line + 2
        ))
    })
}

/// Per-column centering/scaling fitted on the training rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformRecord {
    pub standardized: bool,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
    /// Columns left unscaled because they were constant on the train split.
    pub skipped_columns: Vec<usize>,
}

/// Seeded permutation split into `train_n` training rows and the rest, with
/// optional per-column standardization fitted on the training split only
/// and applied to both. Constant columns are left unscaled and recorded.
pub fn split_standardize(
    data: &Dataset,
    train_n: usize,
    seed: u64,
    standardize: bool,
) -> Result<(Dataset, Dataset, TransformRecord)> {
    let n = data.n();
    if train_n == 0 || train_n >= n {
        return Err(Error::InvalidInput(format!(
            "train_n must lie in 1..{n}, got {train_n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(seed, streams::SPLIT);
    // Fisher-Yates.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let take = |rows: &[usize]| -> (Array2<f64>, Array1<f64>) {
        let mut x = Array2::zeros((rows.len(), data.d()));
        let mut y = Array1::zeros(rows.len());
        for (slot, &i) in rows.iter().enumerate() {
            x.row_mut(slot).assign(&data.x.row(i));
            y[slot] = data.y[i];
        }
        (x, y)
    };
    let (mut train_x, train_y) = take(&order[..train_n]);
    let (mut test_x, test_y) = take(&order[train_n..]);

    let d = data.d();
    let mut record = TransformRecord {
        standardized: standardize,
        center: vec![0.0; d],
        scale: vec![1.0; d],
        skipped_columns: Vec::new(),
    };
    if standardize {
        for j in 0..d {
            let col = train_x.column(j);
            let mean = col.sum() / train_n as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / train_n as f64;
            let sd = var.sqrt();
            record.center[j] = mean;
            if sd > 0.0 {
                record.scale[j] = sd;
            } else {
                record.skipped_columns.push(j);
            }
            let scale = record.scale[j];
            train_x.column_mut(j).mapv_inplace(|v| (v - mean) / scale);
            test_x.column_mut(j).mapv_inplace(|v| (v - mean) / scale);
        }
    }
    let train = Dataset::new(train_x, train_y, data.part.clone(), data.task)?;
    let test = Dataset::new(test_x, test_y, data.part.clone(), data.task)?;
    Ok((train, test, record))
}

#[derive(Serialize, Deserialize)]
struct GroupsFile {
    groups: Vec<Vec<usize>>,
}

/// Writes the partition sidecar: `{"groups": [[1,2,3], ...]}` with 1-based
/// indices.
pub fn save_groups(part: &GroupPartition, path: &Path) -> Result<()> {
    let file = GroupsFile {
        groups: part
            .groups()
            .iter()
            .map(|g| g.iter().map(|&i| i + 1).collect())
            .collect(),
    };
    let mut out = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut out, &file)
        .map_err(|e| Error::InvalidInput(format!("writing groups: {e}")))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Reads the partition sidecar written by [`save_groups`].
pub fn load_groups(path: &Path, d: usize) -> Result<GroupPartition> {
    let text = std::fs::read_to_string(path)?;
    let file: GroupsFile = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let zero_based: Result<Vec<Vec<usize>>> = file
        .groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|&i| {
                    if i == 0 {
                        Err(Error::InvalidPartition(
                            "sidecar indices are 1-based; found 0".into(),
                        ))
                    } else {
                        Ok(i - 1)
                    }
                })
                .collect()
        })
        .collect();
    GroupPartition::new(d, zero_based?)
}

/// Writes a dataset as CSV (`x1..xd,y` header) next to its partition
/// sidecar.
pub fn save_dataset_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Csv(e.to_string()))?;
    let mut header: Vec<String> = (1..=data.d()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    writer
        .write_record(&header)
        .map_err(|e| Error::Csv(e.to_string()))?;
    for i in 0..data.n() {
        let mut row: Vec<String> = (0..data.d()).map(|j| format!("{}", data.x[[i, j]])).collect();
        row.push(format!("{}", data.y[i]));
        writer
            .write_record(&row)
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}
