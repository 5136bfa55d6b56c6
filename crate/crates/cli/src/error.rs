use std::fmt;
use std::process::ExitCode;

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    CheckFailure = 1,
    Config = 2,
    GuardHalt = 3,
    Io = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Config,
            message: message.into(),
        }
    }

    pub fn io(context: impl fmt::Display, e: std::io::Error) -> Self {
        Self {
            exit: Exit::Io,
            message: format!("{context}: {e}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<muskat::Error> for CliError {
    fn from(e: muskat::Error) -> Self {
        match e {
            muskat::Error::Io(io) => Self {
                exit: Exit::Io,
                message: format!("I/O error: {io}"),
            },
            other => Self::config(other.to_string()),
        }
    }
}
