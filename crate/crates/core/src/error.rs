use thiserror::Error;

/// Errors raised by grid construction, problem assembly and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("potential is not positive: sampled minimum {min}")]
    NonPositivePotential { min: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("period {period} on axis {axis} does not divide box length {length}")]
    PeriodMismatch {
        axis: usize,
        period: f64,
        length: f64,
    },

    #[error(
        "exponent {name} = {value} outside the admissibility window ({lower}, {upper}) for N = {dim}, alpha = {alpha}"
    )]
    Inadmissible {
        name: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
        dim: usize,
        alpha: f64,
    },

    #[error("degenerate pair{}: {reason}", iteration.map(|i| format!(" at iteration {i}")).unwrap_or_default())]
    DegeneratePair {
        iteration: Option<usize>,
        reason: String,
    },

    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("malformed field dump: {0}")]
    Dump(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
