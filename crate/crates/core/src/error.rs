use thiserror::Error;

/// Errors produced by the modelling library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Matrix or vector sizes disagree with the declared state space or alphabet.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A probability matrix or vector violates stochasticity.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    /// The caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Brute-force enumeration was asked for more paths than it is willing to visit.
    #[error("instance too large for exhaustive enumeration: {paths} paths exceeds limit {limit}")]
    TooLarge { paths: u128, limit: u128 },

    /// An iterative procedure hit its iteration cap.
    #[error("did not converge within {max_iter} iterations (last change {last_delta:e})")]
    NotConverged { max_iter: usize, last_delta: f64 },

    /// A column is constant so no meaningful threshold can be placed.
    #[error("degenerate threshold: column `{0}` is constant")]
    DegenerateThreshold(String),

    /// A metric is undefined on the given inputs.
    #[error("undefined metric: {0}")]
    Undefined(String),

    /// A non-finite value showed up where a finite one is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
