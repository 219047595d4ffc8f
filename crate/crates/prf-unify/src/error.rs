//! Error type shared across the crate.
//!
//! Two broad classes matter to callers: parameter/validation problems
//! (bad config, malformed files, out-of-range arguments) and numeric
//! failures discovered while processing (starved outputs, energy-budget
//! violations). The CLI maps the former to exit code 2 and the latter
//! to exit code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("position {0} outside aperture [{1}, {2}]")]
    OutOfAperture(f64, f64, f64),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{count} starved output cells (first at index {first})")]
    StarvedOutputs { count: usize, first: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for validation/parse problems,
    /// 3 for numeric failures encountered mid-run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::Io(_) | Error::OutOfAperture(..) => 2,
            Error::Numeric(_) | Error::StarvedOutputs { .. } => 3,
        }
    }
}
