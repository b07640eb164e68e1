use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// The requested object is too large to build exactly.
    Capacity {
        what: &'static str,
        needed: u64,
        limit: u64,
    },
    /// An iterative procedure did not reach its tolerance.
    NonConvergence(String),
    /// A result contradicts something that must hold mathematically.
    Inconsistent(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Capacity { what, needed, limit } => write!(
                f,
                "capacity exceeded: {what} needs {needed} but the limit is {limit}"
            ),
            Error::NonConvergence(msg) => write!(f, "did not converge: {msg}"),
            Error::Inconsistent(msg) => write!(f, "internal consistency check failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
