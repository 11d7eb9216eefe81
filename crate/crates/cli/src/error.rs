use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Data(_) => "data",
            Self::Numerical(_) => "numerical",
            Self::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => exit::USAGE,
            Self::Data(_) | Self::Io { .. } => exit::DATA,
            Self::Numerical(_) => exit::NUMERICAL,
        }
    }

    /// One-line JSON record for stderr.
    pub fn machine_line(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind(),
                "code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

fn exit_class(e: &hetgev::Error) -> i32 {
    use hetgev::Error as E;
    match e {
        E::ReturnLevel { source, .. } | E::Replicate { source, .. } => exit_class(source),
        E::NoConvergence { .. } | E::UnsupportedObservation { .. } => exit::NUMERICAL,
        E::InvalidConfig(_) | E::InvalidParams(_) => exit::USAGE,
        _ => exit::DATA,
    }
}

impl From<hetgev::Error> for CliError {
    fn from(e: hetgev::Error) -> Self {
        let msg = e.to_string();
        match exit_class(&e) {
            exit::NUMERICAL => Self::Numerical(msg),
            exit::USAGE => Self::Usage(msg),
            _ => Self::Data(msg),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
