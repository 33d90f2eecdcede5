use thiserror::Error;

/// Crate-wide error type.
///
/// `Param`, `Validation`, `NonFinite`, `NonMonotonicTime`, and `Format` all
/// describe bad inputs or configuration; `Invariant` means the simulator
/// itself produced something inconsistent and is a bug, never a user error.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("non-finite sample in {0}")]
    NonFinite(String),

    #[error("timestamps must be strictly increasing: got {next} after {prev}")]
    NonMonotonicTime { prev: f64, next: f64 },

    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("{path}:{line}: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by user input (bad flags, bad files, bad
    /// scenario values) as opposed to internal bugs or I/O failures.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}
