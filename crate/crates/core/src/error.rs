use thiserror::Error;

/// Errors raised by the analytic, special-function and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: f64 },

    #[error("the interference sum is a point mass at u = 1 and has no density")]
    PointMass,

    #[error("ill-conditioned spectrum: {0}")]
    IllConditioned(String),

    #[error("series did not converge after {terms} terms (last term magnitude {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("{quantity} evaluated to {value}, outside its admissible range")]
    OutOfRange { quantity: &'static str, value: f64 },

    #[error("quadrature did not reach tolerance (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("degenerate Meijer-G parameters: {0}")]
    DegenerateParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, value: f64) -> Error {
    Error::Domain { function, value }
}
