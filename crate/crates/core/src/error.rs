use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("path-loss singularity: distance {0:e} km is below the resolvable minimum")]
    Singular(f64),

    #[error("matrix is rank deficient (condition estimate {0:e})")]
    RankDeficient(f64),

    #[error("cluster contains no radio units")]
    EmptyCluster,

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {evaluations} evaluations")]
    Quadrature { value: f64, error: f64, evaluations: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }
}
