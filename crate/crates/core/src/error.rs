use thiserror::Error;

use crate::arrays::AnglePair;
use crate::optimizers::ReflectionSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular system: {0}")]
    Singular(String),

    /// The iteration budget ran out; `best` holds the last feasible iterate.
    #[error("no convergence after {iterations} iterations (gradient-map norm {residual:.3e})")]
    ConvergenceFailure {
        iterations: usize,
        residual: f64,
        best: Box<ReflectionSolution>,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("estimation failed: found {} of {wanted} peaks", found.len())]
    EstimationFailure { wanted: usize, found: Vec<AnglePair> },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
