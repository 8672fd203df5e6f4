use std::fmt;
use std::path::Path;

use matvar_core::Error;

/// Process exit codes.
pub mod code {
    pub const PASS: i32 = 0;
    /// I/O, usage, malformed documents and any numerical breakdown.
    pub const USAGE: i32 = 1;
    pub const MEMBERSHIP: i32 = 2;
    pub const SINGULAR: i32 = 3;
    /// Class failure or diverging moments.
    pub const CLASS: i32 = 4;
    pub const NO_SAMPLER: i32 = 5;
    pub const VERDICT: i32 = 6;
    pub const MC_DISAGREEMENT: i32 = 7;
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: code::USAGE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::usage(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SingularCoefficient { .. } => code::SINGULAR,
            Error::ClassFailure { .. } | Error::MomentsDiverge { .. } => code::CLASS,
            Error::NoSampler(_) => code::NO_SAMPLER,
            _ => code::USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;
