use thiserror::Error;

/// Errors produced by the numerical kernels and the higher-level routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^H| = {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("bad spectrum: {0}")]
    BadSpectrum(String),
    #[error("Kraus operators violate completeness (deviation {0:.3e})")]
    InvalidChannel(f64),
    #[error("bad optimizer configuration: {0}")]
    BadConfig(String),
    #[error("Cayley retraction is ill-conditioned")]
    SingularRetraction,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("missing witness: {0}")]
    MissingWitness(String),
    #[error("total dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid input rather than by a numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NonFinite | Error::SingularRetraction | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
