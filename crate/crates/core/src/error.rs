use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix is not symmetric (max relative asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("state is unphysical: minimum symplectic eigenvalue {0:.12} < 1")]
    Unphysical(f64),

    #[error("matrix is not symplectic (max deviation {0:.3e})")]
    NotSymplectic(f64),

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("variance model is not increasing on [{lo}, {hi}]")]
    NonMonotoneModel { lo: f64, hi: f64 },

    #[error("empty sample batch")]
    EmptyBatch,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
