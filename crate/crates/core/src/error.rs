use alloc::string::String;
use core::fmt;

/// Errors raised by the solver and its checkers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (for example a subset larger than the degree it is drawn from).
    Domain(String),
    /// Malformed or inconsistent input data.
    Input(String),
    /// A documented side-condition of the operation does not hold.
    Precondition(String),
    /// Exact computation would exceed the configured term budget.
    Budget {
        context: String,
        needed: u64,
        budget: u64,
    },
    /// Random graph generation failed after its bounded retries.
    Generation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::Budget {
                context,
                needed,
                budget,
            } => write!(
                f,
                "enumeration budget exceeded ({context}): needs {needed} terms, budget is {budget}; use the Monte Carlo estimator or shrink the instance"
            ),
            Error::Generation(msg) => write!(f, "graph generation failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
