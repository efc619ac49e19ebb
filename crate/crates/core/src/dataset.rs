//! Regression datasets: predictor matrix, response, group structure, task.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::norm::GroupPartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Linear,
    Logistic,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Task::Linear),
            "logistic" => Ok(Task::Logistic),
            other => Err(Error::InvalidInput(format!(
                "unknown task '{other}' (expected linear or logistic)"
            ))),
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Linear => write!(f, "linear"),
            Task::Logistic => write!(f, "logistic"),
        }
    }
}

/// Training data. Responses are real for the linear task and exactly ±1 for
/// the logistic task; all entries must be finite.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub part: GroupPartition,
    pub task: Task,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>, part: GroupPartition, task: Task) -> Result<Self> {
        let n = x.nrows();
        if n == 0 {
            return Err(Error::InvalidInput("dataset has no rows".into()));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} responses",
                n,
                y.len()
            )));
        }
        if x.ncols() != part.d() {
            return Err(Error::DimensionMismatch(format!(
                "{} predictor columns but partition covers {}",
                x.ncols(),
                part.d()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry in dataset".into()));
        }
        if task == Task::Logistic && y.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidInput(
                "logistic responses must be exactly +1 or -1".into(),
            ));
        }
        Ok(Dataset { x, y, part, task })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_bad_labels_and_shapes() {
        let part = GroupPartition::singletons(2);
        let x = array![[1.0, 2.0], [3.0, 4.0]];
        assert!(Dataset::new(
            x.clone(),
            array![1.0, 0.5],
            part.clone(),
            Task::Logistic
        )
        .is_err());
        assert!(Dataset::new(x.clone(), array![1.0], part.clone(), Task::Linear).is_err());
        assert!(Dataset::new(
            array![[1.0, f64::NAN], [3.0, 4.0]],
            array![1.0, -1.0],
            part.clone(),
            Task::Linear
        )
        .is_err());
        assert!(Dataset::new(x, array![1.0, -1.0], part, Task::Logistic).is_ok());
    }
}
