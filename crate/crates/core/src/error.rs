use thiserror::Error;

use crate::geodesics::GeodesicPath;
use crate::solver::GridSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} is outside the chart domain: {reason}")]
    Domain { point: Vec<f64>, reason: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("positivity violated: value {value} at {at:?}")]
    Positivity { value: f64, at: Vec<f64> },

    #[error("geodesic left the domain after length {}: {reason}", .partial.length)]
    TruncatedPath { partial: Box<GeodesicPath>, reason: String },

    #[error("comparison unavailable: {0}")]
    ComparisonUnavailable(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: Box<GridSolution>,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(point: &[f64], reason: impl Into<String>) -> Self {
        Error::Domain { point: point.to_vec(), reason: reason.into() }
    }
}
