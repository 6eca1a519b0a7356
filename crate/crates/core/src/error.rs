use std::io;

use thiserror::Error;

/// Errors raised by construction, queries and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} {value} out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("occurrence {j} of {what} not found ({available} available)")]
    NotFound {
        what: String,
        j: u64,
        available: u64,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("undefined for empty input: {0}")]
    Undefined(&'static str),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(what: &'static str, value: u64, min: u64, max: u64) -> Result<()> {
    if value < min || value > max {
        Err(Error::OutOfRange {
            what,
            value,
            min,
            max,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn not_found(symbol: u64, j: u64, available: u64) -> Error {
    Error::NotFound {
        what: format!("symbol {symbol}"),
        j,
        available,
    }
}
