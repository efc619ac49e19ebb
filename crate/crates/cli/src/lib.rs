//! Library side of the command-line front end: dataset loading with the
//! partition sidecar, and the replicated experiment driver.

pub mod experiment;
pub mod io;

/// Process exit code for an error: 2 for bad input, 3 for numerical
/// failure.
pub fn exit_code_for(e: &gdro::Error) -> i32 {
    use gdro::Error::*;
    match e {
        DimensionMismatch(_) | InvalidPartition(_) | InvalidNormSpec(_) | InvalidInput(_)
        | Csv(_) | Io(_) => 2,
        DegenerateFit(_) | DegenerateErrors(_) | Factorization(_) | Numerical(_) => 3,
    }
}
