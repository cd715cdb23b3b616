use alloc::string::String;
use core::fmt;

/// Errors raised by the core crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A constant vector cannot be mapped onto `[0, 1]` by a positive affine map.
    Normalization,
    /// A 1-based index fell outside `1..=bound`.
    Index {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    /// Range voting's welfare is zero, so the welfare ratio has no value.
    UndefinedRatio,
    /// An input violated a stated precondition.
    Precondition(String),
    /// Mixture weights were negative or did not sum to one.
    Weight(String),
    /// An exhaustive enumeration would exceed the configured budget.
    Budget { required: u128, budget: u128 },
    /// A utility value was not on the `1/k` grid.
    Grid(String),
    /// Projection left no voter with candidate 1 above one half.
    DegenerateProjection,
    /// A mechanism specification string failed to parse.
    Parse { token: String, reason: String },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Normalization => write!(f, "cannot normalize a constant utility vector"),
            Error::Index { what, index, bound } => {
                write!(f, "{what} index {index} out of range 1..={bound}")
            }
            Error::UndefinedRatio => write!(f, "ratio undefined: range-voting welfare is zero"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Weight(msg) => write!(f, "invalid mixture weights: {msg}"),
            Error::Budget { required, budget } => {
                write!(f, "enumeration needs {required} steps, budget is {budget}")
            }
            Error::Grid(msg) => write!(f, "off-grid value: {msg}"),
            Error::DegenerateProjection => {
                write!(f, "projection leaves no voter valuing candidate 1 above 1/2")
            }
            Error::Parse { token, reason } => write!(f, "bad token `{token}`: {reason}"),
        }
    }
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

impl core::error::Error for Error {}
