//! Crate-wide error type.

use thiserror::Error;

use crate::estimation::MomentFeasibility;

/// Errors produced by state/operator validation, law handling, sampling,
/// estimation, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("state vector is not normalized: sum of squared moduli is {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("matrix is not Hermitian: max deviation {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("purity {purity} exceeds 1")]
    PurityExceedsOne { purity: f64 },

    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error(
        "target second moment {target} is infeasible: the supremum over the \
         family on this support is {supremum} (approached as scale grows)"
    )]
    InfeasibleTarget { target: f64, supremum: f64 },

    #[error("scale solve failed: wanted second moment {target}, best achieved {achieved}")]
    ScaleSolveFailed { target: f64, achieved: f64 },

    #[error("moment estimator of order {order} is undefined for {shots} shots per realization")]
    EstimatorUndefined { order: u32, shots: u64 },

    #[error("infeasible moments: {0}")]
    InfeasibleMoments(MomentFeasibility),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
