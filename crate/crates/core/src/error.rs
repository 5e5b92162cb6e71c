use std::path::PathBuf;

use crate::volume::VolumeEstimate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("edge count {k} out of range: must satisfy 0 <= k <= {max}")]
    EdgeCountOutOfRange { k: usize, max: usize },

    #[error("theta[{index}] = {value} is not a finite positive number")]
    InvalidTheta { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid weight model: {0}")]
    InvalidWeightModel(String),

    #[error("invalid adjacency matrix: {0}")]
    InvalidAdjacency(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameter box: theta_min = {theta_min}, theta_max = {theta_max}")]
    InvalidBox { theta_min: f64, theta_max: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("deformed matrix is degenerate (log|det| = {log_abs_det}); point lies outside the integration domain")]
    Degenerate { log_abs_det: f64 },

    #[error("estimation failed: all {} samples excluded ({} overflow, {} degenerate)",
        .0.n_samples, .0.n_excluded_overflow, .0.n_excluded_degenerate)]
    EstimationFailed(VolumeEstimate),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
