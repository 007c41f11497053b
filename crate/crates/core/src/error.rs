use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scenario or parameter value breaks a type invariant.
    Validation { field: String, reason: String },
    /// A vehicle at `position_m` is outside every RSU's coverage radius.
    Uncovered { vehicle: u32, position_m: f64 },
    /// Positive input data over a zero-rate access link.
    UnreachableTier,
    /// Decision vector length does not match the scenario's task count.
    LengthMismatch { expected: usize, got: usize },
    /// Exhaustive enumeration refused above the size bound.
    OracleTooLarge { tasks: usize, max: usize },
    /// Invalid optimizer or experiment parameter.
    InvalidParam { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam { name, reason: reason.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation { field, reason } => write!(f, "invalid `{field}`: {reason}"),
            Error::Uncovered { vehicle, position_m } => {
                write!(f, "vehicle {vehicle} at {position_m} m is not covered by any RSU")
            }
            Error::UnreachableTier => f.write_str("tier unreachable: zero link rate with positive input data"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "decision vector has {got} entries, scenario has {expected} tasks")
            }
            Error::OracleTooLarge { tasks, max } => {
                write!(f, "exhaustive oracle refuses {tasks} tasks (limit {max})")
            }
            Error::InvalidParam { name, reason } => write!(f, "invalid parameter `{name}`: {reason}"),
        }
    }
}

impl core::error::Error for Error {}
