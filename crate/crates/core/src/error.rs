use thiserror::Error;

/// Errors raised by the lognormal model, the estimators and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),

    /// A density was requested for a zero-variance (point mass) distribution.
    #[error("degenerate distribution: {0}")]
    Degenerate(&'static str),

    /// A closed-form moment left the range of finite positive doubles.
    #[error("{field} is not finite for mu_y={mu_y}, sigma2_y={sigma2_y}")]
    NonFinite {
        field: &'static str,
        mu_y: f64,
        sigma2_y: f64,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("sample too small: need n >= {required}, got n = {n}")]
    SampleTooSmall { n: u64, required: u64 },

    /// A simulation cell would draw more variates than the configured budget allows.
    #[error("simulation cost {cost} variates exceeds budget of {budget}")]
    Budget { cost: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
