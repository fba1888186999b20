use thiserror::Error;

/// Everything that can go wrong in the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ambient mismatch: {left} vs {right}")]
    AmbientMismatch { left: String, right: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("ambient {0} has no multiplication")]
    NotAnAlgebra(String),

    #[error("projection is singular at this input (norm {norm:e})")]
    SingularProjection { norm: f64 },

    #[error("field is not tangent: max defect {defect:e} exceeds {tolerance:e}")]
    NotTangent { defect: f64, tolerance: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("{value} lies outside [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("point {0:?} lies outside the plot domain")]
    OutsidePlot(Vec<f64>),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("metric is not positive semidefinite: det = {det:e}")]
    InvalidMetric { det: f64 },

    #[error("form degrees {alpha} + {beta} do not sum to {dim} (volume form degree {omega})")]
    DegreeMismatch {
        alpha: usize,
        beta: usize,
        omega: usize,
        dim: usize,
    },

    #[error("no admissible path: {0}")]
    Connectivity(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
