use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {z} lies outside the domain |z| < {rho}")]
    Domain { z: String, rho: f64 },

    #[error("invalid disk map: {0}")]
    InvalidMap(String),

    #[error("derivative at the origin vanishes (|f'(0)| = {0:e})")]
    DegenerateDerivative(f64),

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dilatation pair is not admissible: sup quotient {0} >= 1")]
    Dilatation(f64),

    #[error("circle map rejected: {0}")]
    CircleMap(String),

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("boundary curve is not a Jordan curve: {0}")]
    SelfIntersection(String),

    #[error("exterior map solver failed: {0}")]
    ExteriorSolver(String),

    #[error("degenerate polyline: {0}")]
    DegeneratePolyline(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
