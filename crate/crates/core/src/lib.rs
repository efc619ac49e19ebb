//! Groupwise distributionally robust regression toolkit.
//!
//! The estimators here penalize regression coefficients with a groupwise
//! norm: predictors are partitioned into groups and the penalty is an outer
//! norm of weighted per-group inner norms. The library provides
//!
//! * exact arithmetic for that norm family, its dual, and constructive
//!   Hölder-equality witnesses ([`norm`]),
//! * block solvers for group-square-root-lasso linear regression and
//!   group-lasso logistic regression ([`solvers`]),
//! * a closed-form, quantile-based selector for the regularization
//!   parameter that avoids cross-validation ([`rwpi`]),
//! * discrete optimal-transport machinery and adversarial verifiers that
//!   certify the worst-case-loss representation numerically ([`transport`],
//!   [`adversary`]),
//! * simulation designs, polynomial group expansion, CSV ingestion
//!   ([`data`]), and a K-fold cross-validation baseline ([`cv`]).

pub mod adversary;
pub mod cv;
pub mod data;
pub mod dataset;
pub mod error;
pub mod linalg;
pub mod norm;
pub mod rng;
pub mod rwpi;
pub mod solvers;
pub mod transport;
pub mod verify;

pub use dataset::{Dataset, Task};
pub use error::{Error, Result};
pub use norm::{Exponent, GroupPartition, NormSpec};
