use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("deformation gradient is not invertible (det F = {0:e})")]
    NonInvertibleF(f64),

    #[error("right Cauchy-Green tensor is singular (det C = {0:e})")]
    SingularC(f64),

    #[error("invalid arguments: {0}")]
    InvalidArgs(String),

    #[error("design point {index}: {source}")]
    AtDesignPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("element {element}, Gauss point {gauss_point}: {source}")]
    AtGaussPoint {
        element: usize,
        gauss_point: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid length-scale {0:e}: must be positive and finite")]
    InvalidTheta(f64),

    #[error("Cholesky factorization failed with nugget up to {max_nugget:e}")]
    CholeskyFailure { max_nugget: f64 },

    #[error("duplicate training inputs at rows {0} and {1}")]
    DuplicateInputs(usize, usize),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("linear solve failed: zero pivot at equation {0}")]
    LinearSolveFailure(usize),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
