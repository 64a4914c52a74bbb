use thiserror::Error;

/// Everything that can go wrong while evaluating the protocol model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unphysical covariance: {0}")]
    Unphysical(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("truncation needs N_max = {needed}, above the cap of {cap}")]
    Truncation { needed: usize, cap: usize },

    #[error("success probability {probability:e} is below 10x the truncation tail {tail:e}")]
    UnreliableNormalization { probability: f64, tail: f64 },

    #[error("oracle moment structure violated: {0}")]
    Structure(String),

    #[error("no key: {0}")]
    NoKey(String),

    #[error("no sign change of the key rate within {0} km")]
    UnboundedBracket(f64),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("invalid study: {0}")]
    InvalidStudy(String),
}

impl Error {
    /// Errors that mean "a value was demanded but the model has none", as
    /// opposed to bad input.
    pub fn is_no_result(&self) -> bool {
        matches!(self, Error::NoKey(_) | Error::UnboundedBracket(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
