use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which coordinate of a [`BlockSpec`](crate::BlockSpec) failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    X1,
    X2,
    Y1,
    Y2,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::X1 => "x1",
            Bound::X2 => "x2",
            Bound::Y1 => "y1",
            Bound::Y2 => "y2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// 1-indexed row whose runs do not add up to the image width.
    #[error("row {row}: runs sum to {sum}, expected width {width}")]
    CorruptRow { row: usize, sum: u64, width: usize },

    #[error("{bound} = {value} is out of bounds (expected {min}..={max})")]
    OutOfBounds {
        bound: Bound,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("column {column} is beyond the end of a row of width {width}")]
    ColumnOutOfRange { column: usize, width: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    /// Malformed external data. `at` names the row, line, byte or bit offset.
    #[error("{format} parse error at {at}: {message}")]
    Parse {
        format: &'static str,
        at: String,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(format: &'static str, at: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            format,
            at: at.into(),
            message: message.into(),
        }
    }
}
