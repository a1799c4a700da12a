use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric fault at t = {t}: {what}")]
    NumericFault { t: f64, what: String },

    #[error(
        "implicit solve diverged at t = {t} after {iterations} iterations (residual {residual:e})"
    )]
    SolverDivergence {
        t: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Attach the simulation time at which a step failed.
    pub(crate) fn at_time(self, t: f64) -> Self {
        match self {
            Error::NumericFault { what, .. } => Error::NumericFault { t, what },
            Error::SolverDivergence {
                iterations,
                residual,
                ..
            } => Error::SolverDivergence {
                t,
                iterations,
                residual,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
