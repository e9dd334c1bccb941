use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} must be {requirement} (got {value})")]
    Domain {
        quantity: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("secondary link {index} is not active in the activation vector")]
    InactiveLink { index: usize },

    #[error("{what} index {index} out of range (count {count})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        count: usize,
    },

    #[error("activation vector has {got} bits but the instance has {expected} secondary links")]
    LengthMismatch { expected: usize, got: usize },

    #[error("exhaustive search supports at most {max} secondary links (got {got})")]
    TooManyLinks { got: usize, max: usize },

    #[error("swarm search requires at least one secondary link")]
    NoSecondaryLinks,
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::Domain {
            quantity,
            requirement,
            value,
        }
    }
}
