use num_bigint::BigUint;
use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by the library.
///
/// Callers that need coarse dispatch (e.g. a CLI choosing an exit code) can
/// use [`Error::is_usage`] / [`Error::is_resource`] instead of matching every
/// variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sieve limit {requested} outside supported range [2, {max}]")]
    SieveLimit { requested: u64, max: u64 },

    #[error("argument {value} exceeds the sieve limit {limit}")]
    BeyondSieveLimit { value: u64, limit: u64 },

    #[error("bad coefficient item {item:?}: {reason}")]
    ParseSet { item: String, reason: String },

    #[error("set is not balanced: sum a(d)/d = {balance}")]
    Unbalanced { balance: num_rational::BigRational },

    #[error("period {lcm} exceeds the period cap {cap}")]
    PeriodCapExceeded { lcm: BigUint, cap: u64 },

    #[error("search space of about {estimate} candidates exceeds the budget {budget}")]
    SearchBudgetExceeded { estimate: u128, budget: u64 },

    #[error("invalid search spec: {0}")]
    InvalidSearchSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bounds not derivable for this set: {0}")]
    BoundsUnavailable(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for malformed input: parse failures, invalid flags, inapplicable sets.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::ParseSet { .. }
                | Error::Unbalanced { .. }
                | Error::InvalidSearchSpec(_)
                | Error::InvalidArgument(_)
                | Error::BoundsUnavailable(_)
        )
    }

    /// True for exhausted limits: sieve bounds, period caps, search budgets, I/O.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::SieveLimit { .. }
                | Error::BeyondSieveLimit { .. }
                | Error::PeriodCapExceeded { .. }
                | Error::SearchBudgetExceeded { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
