use thiserror::Error;

/// Errors raised by the distribution primitives, the sampler and the
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("root finding did not converge for p = {p} in bracket [{lo}, {hi}] after {iterations} iterations")]
    NoConvergence {
        p: f64,
        lo: f64,
        hi: f64,
        iterations: usize,
    },

    #[error("observation {index} (value {value}) is unsupported by all components")]
    UnsupportedObservation { index: usize, value: f64 },

    #[error("return level failed for draw {draw} at p = {p}: {source}")]
    ReturnLevel {
        draw: usize,
        p: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("replicate {replicate} failed: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no posterior draws")]
    EmptyDraws,
}

impl Error {
    /// True for failures of a numerical routine rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::UnsupportedObservation { .. } => true,
            Error::ReturnLevel { source, .. } | Error::Replicate { source, .. } => {
                source.is_numerical()
            }
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
