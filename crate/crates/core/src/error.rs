use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("degenerate or censored result: {0}")]
    Degenerate(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, used as the stderr prefix by the CLI.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Capacity(_) => "capacity",
            Error::NonConvergence(_) => "nonconvergence",
            Error::Degenerate(_) => "degenerate",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::Io(_) => 2,
            Error::Capacity(_) => 3,
            Error::NonConvergence(_) => 4,
            Error::Degenerate(_) => 5,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
