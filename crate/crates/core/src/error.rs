use thiserror::Error;

/// Errors raised by group construction, simulation and testing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse group spec {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("group order {order} exceeds the configured maximum {max}")]
    Overflow { order: u128, max: u64 },

    #[error("element {0} is out of range for this group")]
    InvalidElement(String),

    #[error("operation requires an abelian group")]
    NotAbelian,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("unsupported group kind for {0}")]
    Unsupported(String),

    #[error("enumeration budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle domain does not match the group")]
    DomainMismatch,

    #[error("generated instance failed its post-check: {0}")]
    PostCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
