use thiserror::Error;

/// Errors raised by group, distribution and check constructors.
///
/// The variants follow the failure classes the scenario runner maps onto
/// process exit codes: structural and domain problems are configuration
/// errors, capacity problems get their own code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes, moduli or groups of two operands do not match.
    #[error("structural error: {0}")]
    Structural(String),

    /// An enumeration would exceed the configured bound.
    #[error("capacity error: {what} needs {needed} elements, bound is {bound}")]
    Capacity {
        what: String,
        needed: u128,
        bound: u128,
    },

    /// An input is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructed object failed its runtime validation.
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, needed: u128, bound: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            needed,
            bound,
        }
    }
}
