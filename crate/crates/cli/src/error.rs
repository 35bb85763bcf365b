use std::fmt;

/// Failure of a command, carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

pub const USAGE: u8 = 2;
pub const DATA: u8 = 3;
pub const NUMERICAL: u8 = 4;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: USAGE, msg: msg.into() }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Self { code: DATA, msg: msg.into() }
    }

    /// Library error raised while handling configuration.
    pub fn config(e: flashcap::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<flashcap::Error> for CliError {
    fn from(e: flashcap::Error) -> Self {
        use flashcap::Error::*;
        let code = match e {
            Numerical { .. } => NUMERICAL,
            Domain(_) | InvalidParams(_) | Config { .. } => USAGE,
            _ => DATA,
        };
        Self { code, msg: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}
