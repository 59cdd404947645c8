use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("density operator trace is {0}, expected 1")]
    NotUnitTrace(f64),

    #[error("density operator has negative eigenvalue {0:.3e}")]
    NotPositive(f64),

    #[error("observable does not square to identity (deviation {0:.3e})")]
    NotInvolution(f64),

    #[error("channel does not preserve trace (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("channel is not completely positive (Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    #[error("channel maps Hermitian operators to non-Hermitian ones (deviation {0:.3e})")]
    NotHermiticityPreserving(f64),

    #[error("trace has imaginary part {0:.3e}")]
    ComplexTrace(f64),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("outcome tree too large: {0} measured events (limit 20)")]
    TooManyEvents(usize),

    #[error("joint distribution sums to {0}, expected 1")]
    DistributionNotNormalized(f64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
