use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance has {count} elements, above the enumeration cap of {cap}")]
    CapExceeded { count: BigUint, cap: u64 },

    #[error("no moment sequence for color {color}")]
    MissingSequence { color: u32 },

    #[error("color {color} needs moments up to order {required}, but its sequence stops at order {available}")]
    InsufficientMoments {
        color: u32,
        required: usize,
        available: usize,
    },

    #[error("arcsine density is undefined at x = {x}: support is the open interval (-sqrt 2, sqrt 2)")]
    Domain { x: f64 },

    #[error("quadrature did not converge within {panels} panels: estimate {estimate}, error bound {error_bound:e}")]
    Convergence {
        estimate: f64,
        error_bound: f64,
        panels: usize,
    },

    #[error("moment file: {0}")]
    MomentFormat(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
