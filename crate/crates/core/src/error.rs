use thiserror::Error;

use crate::quadrature::EnergyReport;

/// Everything that can go wrong while building parameters, integrating, or
/// assembling a verification record.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(i64),

    #[error("integrability exponent p must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("smoothness s must lie in the open interval (0, 1), got {0}")]
    InvalidSmoothness(f64),

    #[error("critical case: |p*s - 1| = {gap:e} is inside the excluded band {guard:e}")]
    CriticalCase { gap: f64, guard: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("declared singularity exponent {0} is not integrable (must be > -1)")]
    NonIntegrable(f64),

    #[error("quadrature did not converge within the refinement budget (best estimate {:e} +/- {:e})", best.value, best.error_estimate)]
    NonConvergence { best: EnergyReport },

    #[error("inadmissible test function: {0}")]
    InadmissibleFunction(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by rejected inputs rather than numerical failure.
    pub fn is_parameter_rejection(&self) -> bool {
        !matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
