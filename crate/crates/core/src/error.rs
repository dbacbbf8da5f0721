use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The drift matrix has an eigenvalue with non-negative real part, so no
    /// stationary state exists.
    #[error("unstable regime: max Re eig(f) = {max_real_part:.6e} (must be < 0)")]
    Unstable { max_real_part: f64 },

    #[error("singular Langevin system at omega' = {omega}: |det m| = {det:.3e}")]
    Singular { omega: f64, det: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("time step {dt} exceeds the limit {limit} (1/50 of the modulation period)")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("empty {0} grid")]
    EmptyGrid(&'static str),

    #[error("empty result")]
    EmptyResult,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("config domain error: {0}")]
    ConfigDomain(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed result document: {0}")]
    Document(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
