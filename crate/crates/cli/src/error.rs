use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Property(String),

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 0 ok, 1 I/O, 2 usage, 3 numerical failure, 4 property failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Property(_) => 4,
        }
    }
}

impl From<jcxy_core::Error> for CliError {
    fn from(err: jcxy_core::Error) -> Self {
        use jcxy_core::Error;
        match err {
            Error::InvalidArgument(msg) => CliError::Usage(msg),
            e @ Error::SectorStraddle { .. } => CliError::Property(e.to_string()),
            e @ (Error::NoConvergence { .. } | Error::NotSymmetric { .. }) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}
