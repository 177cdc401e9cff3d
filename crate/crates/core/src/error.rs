use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument outside function domain: {0}")]
    Domain(String),

    #[error("matrix is not positive definite (pivot {pivot}, jitter {jitter:e})")]
    NotPositiveDefinite { pivot: usize, jitter: f64 },

    #[error("grid of {points} points exceeds the sampling limit of {limit}")]
    TooLarge { points: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("simulation failure: {0}")]
    Simulation(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for failures of a numerical procedure (solver divergence,
    /// simulation breakdown) as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Solver(_) | Error::Simulation(_))
    }
}
