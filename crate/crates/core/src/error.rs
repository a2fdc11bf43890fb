//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad input geometry: coincident points, non-simple polygons,
    /// overlapping continua, terminals outside the window.
    #[error("geometry: {0}")]
    Geometry(String),

    /// An iteration failed to converge within its budget.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// A linear system was too ill-conditioned to trust.
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("format: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code contract: 1 domain error, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Geometry(_) => 1,
            Error::NonConvergence(_) | Error::IllConditioned(_) => 2,
            Error::Io(_) | Error::Format(_) => 3,
        }
    }
}
