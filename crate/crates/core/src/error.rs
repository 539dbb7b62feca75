use thiserror::Error;

/// Everything that can go wrong between building a lattice and writing a sweep.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("no convergence after {iterations} iterations (best residual {best_residual:.3e})")]
    Convergence { iterations: usize, best_residual: f64 },

    #[error("truncated spectrum insufficient: {0}")]
    Truncation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Json(_) => 1,
            Error::ResourceLimit(_) | Error::Truncation(_) => 2,
            Error::Convergence { .. } => 3,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
