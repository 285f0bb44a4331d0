use std::path::{Path, PathBuf};

/// Process exit codes. Stable: scripts depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitStatus {
    Success = 0,
    Io = 1,
    Config = 2,
    Solver = 3,
    /// A location or shape tie under `--strict`.
    Tie = 4,
    /// The location maximum sits on the sampling-box boundary, under `--strict`.
    Boundary = 5,
    /// A labelled gesture table is not diagonal-dominant.
    NotDiagonal = 6,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] emgest::Error),
    #[error("{0}")]
    Tie(String),
    #[error("{0}")]
    Boundary(String),
    #[error("{0}")]
    NotDiagonal(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn status(&self) -> ExitStatus {
        use emgest::Error as E;
        match self {
            CliError::Io { .. } => ExitStatus::Io,
            CliError::Config(_) => ExitStatus::Config,
            CliError::Input(_) => ExitStatus::Io,
            CliError::Tie(_) => ExitStatus::Tie,
            CliError::Boundary(_) => ExitStatus::Boundary,
            CliError::NotDiagonal(_) => ExitStatus::NotDiagonal,
            CliError::Core(e) => match e {
                E::Io(_)
                | E::Json(_)
                | E::Truncated
                | E::ChecksumMismatch
                | E::VersionMismatch { .. }
                | E::InvalidDictionary(_)
                | E::MissingEntry { .. }
                | E::LayoutMismatch(_)
                | E::GridMismatch => ExitStatus::Io,
                E::NotConverged { .. }
                | E::IncompleteDictionary(_)
                | E::MemoryBudget { .. }
                | E::NonFiniteIncident(_)
                | E::PointInsideSupport(_)
                | E::CoincidentPoints { .. }
                | E::ZeroNorm(_) => ExitStatus::Solver,
                _ => ExitStatus::Config,
            },
        }
    }
}
