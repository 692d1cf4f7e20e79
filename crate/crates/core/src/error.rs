use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse quarter from {token:?}")]
    ParseQuarter { token: String },

    #[error("{}{}: {message}", path.display(), row.map(|r| format!(", row {r}")).unwrap_or_default())]
    Load {
        path: PathBuf,
        row: Option<usize>,
        message: String,
    },

    #[error("insufficient sample: {0}")]
    InsufficientSample(String),

    #[error("singular design: collinear columns {}", columns.join(", "))]
    SingularDesign { columns: Vec<String> },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("numerically singular product-moment matrix: {0}")]
    Conditioning(String),

    #[error("zero actual value at {at}; MAPE is undefined")]
    ZeroActual { at: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InsufficientSample(_)
            | Error::SingularDesign { .. }
            | Error::NotPositiveDefinite(_)
            | Error::Conditioning(_)
            | Error::ZeroActual { .. } => ErrorKind::Numerical,
            Error::ParseQuarter { .. }
            | Error::Load { .. }
            | Error::InvalidInput(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => ErrorKind::Data,
        }
    }

    pub(crate) fn load(path: impl Into<PathBuf>, row: Option<usize>, message: impl Into<String>) -> Self {
        Error::Load {
            path: path.into(),
            row,
            message: message.into(),
        }
    }
}
