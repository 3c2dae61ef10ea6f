use std::path::PathBuf;

/// Errors raised anywhere in the simulation pipeline.
///
/// The variants map one-to-one onto the CLI exit-code classes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error at t = {time_hr} hr: {message}")]
    Numerical { time_hr: f64, message: String },

    #[error("state error: {0}")]
    State(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {required} events, got {found}")]
    InsufficientData { required: usize, found: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(time_hr: f64, msg: impl Into<String>) -> Self {
        Error::Numerical {
            time_hr,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: msg.into(),
        }
    }
}
