use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("density is zero at every node")]
    AllZeroDensity,

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("conditional density vanishes at x = {x}")]
    ZeroConditional { x: f64 },

    #[error("sampled a point where the sampling likelihood is {value}")]
    NonPositiveLikelihood { value: f64 },

    #[error("CDF inversion did not converge for u = {u} (residual {residual:e})")]
    NewtonNoConvergence { u: f64, residual: f64 },

    #[error("implicit particle push diverged after {iterations} iterations (residual {residual:e})")]
    FixedPointDiverged { iterations: usize, residual: f64 },

    #[error("normal equations are singular; use a positive ridge weight")]
    SingularSystem,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
}

impl Error {
    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::AllZeroDensity => "all_zero_density",
            Error::EmptyPointSet => "empty_point_set",
            Error::ZeroConditional { .. } => "zero_conditional",
            Error::NonPositiveLikelihood { .. } => "non_positive_likelihood",
            Error::NewtonNoConvergence { .. } => "newton_no_convergence",
            Error::FixedPointDiverged { .. } => "fixed_point_diverged",
            Error::SingularSystem => "singular_system",
            Error::InvalidInput(_) => "invalid_input",
            Error::Format(_) => "format",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
