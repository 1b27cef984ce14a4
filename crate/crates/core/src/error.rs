use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart is not an immersion at ({y0}, {y1}): |a1 ^ a2| = {norm:e}")]
    ImmersionFailure { y0: f64, y1: f64, norm: f64 },

    #[error("point ({y0}, {y1}) lies outside the parameter domain")]
    DomainViolation { y0: f64, y1: f64 },

    #[error("deformed tangent vectors are degenerate: |a1 ^ a2| = {area:e}")]
    DegenerateDeformation { area: f64 },

    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(&'static str),

    #[error("field does not satisfy the clamped boundary conditions (max boundary value {max:e})")]
    BoundaryViolation { max: f64 },

    #[error("bump support B(z, 1/n) is not strictly contained in the domain")]
    SupportViolation,

    #[error("base force has zero norm ({norm:e}); it cannot be rescaled")]
    DegenerateBase { norm: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("energy became non-finite at iteration {iteration}")]
    NonFiniteEnergy { iteration: usize },

    #[error("eigen-iteration did not converge after {iterations} iterations")]
    EigenNotConverged { iterations: usize },

    #[error("missing estimate: {0}")]
    MissingEstimate(&'static str),

    #[error("linear algebra failure: {0}")]
    Linalg(&'static str),
}
