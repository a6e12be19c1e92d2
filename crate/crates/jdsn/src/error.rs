//! Crate-wide error type.
//!
//! Errors fall into two coarse categories that the CLI maps to process exit
//! codes: configuration errors (malformed input, inadmissible parameters,
//! missing fields) exit with code 2, and numerical/runtime errors (diverging
//! paths, failed quadrature, degenerate matrices, study-level failures) exit
//! with code 3.

use thiserror::Error;

/// Crate-wide error enum.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent configuration input.
    #[error("config error: {0}")]
    Config(String),
    /// Invalid model construction or evaluation (dimension mismatch,
    /// inadmissible parameters, vanishing coefficients).
    #[error("model error: {0}")]
    Model(String),
    /// Derivative or density evaluation requested on the support boundary or
    /// outside of it.
    #[error("boundary error: {0}")]
    Boundary(String),
    /// Path simulation failure (explosion, invalid state).
    #[error("simulation error: {0}")]
    Simulation(String),
    /// Optimizer failure (not mere non-convergence, which is flagged in
    /// results instead).
    #[error("optimization error: {0}")]
    Optimization(String),
    /// Quadrature failure (non-finite integrand, depth exhaustion).
    #[error("quadrature error: {0}")]
    Quadrature(String),
    /// Linear-algebra failure (singular or indefinite matrix where a
    /// positive-definite one is required).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Monte Carlo study failure (too many failed replications, refused
    /// ladder, insufficient data for diagnostics).
    #[error("study error: {0}")]
    Study(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Model(_) => "model",
            Error::Boundary(_) => "boundary",
            Error::Simulation(_) => "simulation",
            Error::Optimization(_) => "optimization",
            Error::Quadrature(_) => "quadrature",
            Error::Numerical(_) => "numerical",
            Error::Study(_) => "study",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code for the CLI: 2 for configuration problems, 3 for
    /// numerical/runtime problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Model(_) | Error::Json(_) => 2,
            _ => 3,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
