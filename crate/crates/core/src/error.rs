use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("matrix is not Hermitian (anti-Hermitian residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("singular matrix")]
    Singular,
    #[error("operator set is already Bopp-shifted")]
    AlreadyShifted,
    #[error("operator set does not match the requested noncommutative parameters")]
    TagMismatch,
    #[error("series divergence: spectral radius of the kinetic correction is {spectral_radius} (must be < 1)")]
    SeriesDivergence { spectral_radius: f64 },
    #[error("level tracking failed: {0}")]
    LevelTracking(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}
