//! File formats, JSON reports and the `chern` command-line tool on top of
//! [`chern_core`].

pub mod cli;
pub mod format;
pub mod model;
pub mod report;

pub use format::{parse_tensor, read_tensor, write_tensor};
pub use model::parse_model;

/// Everything that can go wrong outside the numerical core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Syntax(serde_json::Error),
    #[error("entry {index}, field `{field}`: {message}")]
    Entry {
        index: usize,
        field: &'static str,
        message: String,
    },
    #[error("invalid tensor: {0}")]
    Invalid(chern_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {inner}")]
    InFile { path: String, inner: Box<Error> },
    #[error("model `{spec}`: {message}")]
    Model { spec: String, message: String },
    #[error(transparent)]
    Core(#[from] chern_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn in_file(self, path: &std::path::Path) -> Self {
        Error::InFile {
            path: path.display().to_string(),
            inner: Box::new(self),
        }
    }

    /// 1 when a mathematical hypothesis failed, 2 for every input problem.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Core(e) if e.is_hypothesis_violation() => 1,
            Error::InFile { inner, .. } => inner.exit_code(),
            _ => 2,
        }
    }
}
