use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("configuration error in {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Pricing(#[from] jointvol::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("tolerance breach: {0}")]
    ToleranceBreach(String),
}

impl CliError {
    /// Process exit code: 1 usage or configuration, 2 numerical failure,
    /// 3 tolerance breach, 4 no admissible contour.
    pub fn exit_code(&self) -> u8 {
        use jointvol::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::Io { .. } => 1,
            CliError::ToleranceBreach(_) => 3,
            CliError::Pricing(e) => match e {
                E::ModelRejected(_) | E::InvalidInput(_) => 1,
                E::EmptyStrip(_) | E::OutsideStrip { .. } => 4,
                E::Pole { .. }
                | E::Overflow { .. }
                | E::Underflow { .. }
                | E::NonConvergence { .. }
                | E::Singular(_)
                | E::ImaginaryResidue { .. }
                | E::VarianceExplosion { .. }
                | E::UndefinedPayoff { .. }
                | E::InternalConsistency(_) => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
