use thiserror::Error;

/// Errors raised by the estimators and the simulation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite or divergent state at t = {time}: {variable} = {value}")]
    NonFiniteState {
        time: f64,
        variable: String,
        value: f64,
    },
    #[error("window sample must be finite and non-negative, got {0}")]
    NonFiniteSample(f64),
    #[error("non-finite adaptive-law input `{0}`")]
    NonFiniteInput(&'static str),
    #[error("squared-frequency estimate {value} left [-1e10, 1e10] at t = {time}")]
    ZetaOutOfRange { time: f64, value: f64 },
    #[error("trace is empty")]
    EmptyTrace,
    #[error("window length must be positive, got {0}")]
    NonPositiveWindow(f64),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("unknown sweep axis `{0}` (expected one of zeta0, h0, eta, dt, r)")]
    UnknownAxis(String),
}

impl Error {
    /// True for errors produced by a run that went numerically wrong, as
    /// opposed to a configuration that was rejected up front.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteState { .. }
                | Error::NonFiniteSample(_)
                | Error::NonFiniteInput(_)
                | Error::ZetaOutOfRange { .. }
        )
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::ConfigInvalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
