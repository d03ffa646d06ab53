use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integrand returned a non-finite value {value} at {at}")]
    NonFiniteIntegrand { at: f64, value: f64 },

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate}")]
    NotConverged { value: f64, error_estimate: f64 },

    #[error("unsupported hyperbolic moment r^{power} {kind}")]
    UnsupportedMoment { power: u32, kind: &'static str },

    #[error("spectral truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("field lost positivity: minimum {min} on the evaluation grid")]
    PositivityLoss { min: f64 },

    #[error("operation not supported on this manifold: {0}")]
    Unsupported(&'static str),
}
