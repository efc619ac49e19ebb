//! Dataset loading for the command line: predictors from a headered CSV,
//! group structure from the JSON sidecar, optional unpenalized intercept
//! column.

use std::path::Path;

use gdro::data::{load_csv, load_groups};
use gdro::norm::GroupPartition;
use gdro::solvers::sqrt_size_weights;
use gdro::{Dataset, Error, Result, Task};
use ndarray::{Array1, Array2};

/// A dataset ready for fitting plus its penalty weights (zero on the
/// intercept group, if any).
pub struct LoadedData {
    pub data: Dataset,
    pub weights: Vec<f64>,
    pub has_intercept: bool,
}

pub fn load_dataset(
    data_path: &Path,
    groups_path: &Path,
    task: Task,
    response: &str,
    positive_label: Option<&str>,
    intercept: bool,
) -> Result<LoadedData> {
    let table = load_csv(data_path, response, positive_label)?;
    let d = table.predictors.ncols();
    let part = load_groups(groups_path, d)?;
    if task == Task::Logistic && positive_label.is_none() {
        // The response must already be coded ±1; Dataset::new validates.
    }
    if !intercept {
        let weights = sqrt_size_weights(&part);
        let data = Dataset::new(table.predictors, table.response, part, task)?;
        return Ok(LoadedData {
            data,
            weights,
            has_intercept: false,
        });
    }
    // Append a constant column as its own zero-weight (unpenalized) group.
    let n = table.predictors.nrows();
    let mut x = Array2::<f64>::ones((n, d + 1));
    x.slice_mut(ndarray::s![.., ..d]).assign(&table.predictors);
    let mut groups: Vec<Vec<usize>> = part.groups().to_vec();
    groups.push(vec![d]);
    let part = GroupPartition::new(d + 1, groups)?;
    let mut weights = sqrt_size_weights(&part);
    *weights.last_mut().expect("nonempty") = 0.0;
    let data = Dataset::new(x, table.response, part, task)?;
    Ok(LoadedData {
        data,
        weights,
        has_intercept: true,
    })
}

/// Writes the coefficient report: `index,group,value` with 1-based indices.
pub fn write_beta_csv(path: &Path, beta: &Array1<f64>, part: &GroupPartition) -> Result<()> {
    let mut group_of = vec![0usize; part.d()];
    for (j, g) in part.groups().iter().enumerate() {
        for &i in g {
            group_of[i] = j + 1;
        }
    }
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Csv(e.to_string()))?;
    writer
        .write_record(["index", "group", "value"])
        .map_err(|e| Error::Csv(e.to_string()))?;
    for (i, value) in beta.iter().enumerate() {
        writer
            .write_record([
                (i + 1).to_string(),
                group_of[i].to_string(),
                value.to_string(),
            ])
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}
