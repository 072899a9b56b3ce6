use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A scheme produced a non-finite state.
    #[error("non-finite state at step {step}")]
    Overflow { step: usize },

    /// The reference solution is not finite at a measurement time.
    #[error("non-finite reference solution at t = {t}")]
    ReferenceOverflow { t: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64, tolerance: f64 },

    /// A bracket or enclosure that is guaranteed analytically was not observed.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::ReferenceOverflow { .. }
                | Error::QuadratureFailure { .. }
                | Error::InvariantViolation(_)
        )
    }
}
