use thiserror::Error;

/// Errors raised by grid construction, solvers, checks and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("no grid node falls inside the shape")]
    EmptyDomain,

    #[error("grid spacing {h} is too coarse: {spacings:.2} spacings across the narrowest feature, need at least {required}")]
    SpacingTooCoarse { h: f64, spacings: f64, required: f64 },

    #[error("fields are defined on different domains")]
    DomainMismatch,

    #[error("grids are not aligned: {0}")]
    GridMismatch(String),

    #[error("field has {got} values but the domain has {expected} interior nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("exponent {value} is outside the admissible range {range}")]
    InvalidExponent { value: f64, range: &'static str },

    #[error("dimension {0} is not supported here")]
    InvalidDimension(usize),

    #[error("field is identically zero")]
    ZeroField,

    #[error("ball of radius {radius} around {center:?} is not contained in the grid domain")]
    BallNotContained { center: Vec<f64>, radius: f64 },

    #[error("closed form `{form}` does not match the domain geometry: {reason}")]
    GeometryMismatch { form: String, reason: String },

    #[error("test field `{0}` is not supported away from the boundary")]
    SupportTooClose(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
