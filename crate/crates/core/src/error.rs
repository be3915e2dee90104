use thiserror::Error;

/// Errors surfaced by the spectral laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("direction vector must have unit length (|eta| = {0})")]
    NonUnitDirection(f64),
    #[error("invalid zone configuration: {0}")]
    InvalidZone(String),
    #[error("spectral gap violated: min Re lambda = {min_real_part} at r = {argmin_r}")]
    GapViolation { min_real_part: f64, argmin_r: f64 },
    #[error("no c > 0 admits C <= {c_cap} over the sample grid")]
    PointwiseInfeasible { c_cap: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("initial data not resolved by the grid: {0}")]
    Unresolved(String),
    #[error("initial data aliases on the grid: {0}")]
    Aliasing(String),
    #[error("zero-mode: displacement tracked separately, not recoverable from W at xi = 0")]
    ZeroModeDisplacement,
    #[error("reference rate {rate} is not positive at r = {r}; restrict to the interior zone")]
    NonPositiveReferenceRate { r: f64, rate: f64 },
    #[error("times must be strictly increasing")]
    TimesNotIncreasing,
    #[error("polar pipeline requires data with a closed-form spectrum")]
    MissingClosedForm,
    #[error("decay fit: {0}")]
    InvalidFit(String),
    #[error("invalid data class: {0}")]
    InvalidClass(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
