use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error estimate {error_estimate:e})"
    )]
    Quadrature {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("scenario is not coverable: harvested power never meets consumption")]
    Uncoverable,

    #[error(
        "bisection bracket [{lo:e}, {hi:e}] does not contain the target \
         (coverage {f_lo} .. {f_hi}, target {target})"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },

    #[error("simulation window half-width {half_width} m is below the minimum {minimum} m")]
    WindowTooSmall { half_width: f64, minimum: f64 },

    #[error("tabulated CDF: {0}")]
    Tabulated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
