use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("unknown method {0:?}")]
    UnknownMethod(String),

    #[error("matrix too large for an exact SVD: {rows}x{cols} exceeds the cap of {cap}")]
    MatrixTooLarge { rows: usize, cols: usize, cap: usize },

    #[error("numerical precondition failed in {check}: {source}")]
    Numerical {
        check: String,
        #[source]
        source: randskel::Error,
    },

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical { .. } => 3,
            _ => 2,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

/// Tags a library error with the step that raised it.
pub trait Check<T> {
    fn check(self, what: &str) -> Result<T>;
}

impl<T> Check<T> for randskel::Result<T> {
    fn check(self, what: &str) -> Result<T> {
        self.map_err(|source| match source {
            randskel::Error::Io { path, source } => CliError::Io(format!("{}: {source}", path.display())),
            source => CliError::Numerical { check: what.to_owned(), source },
        })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
