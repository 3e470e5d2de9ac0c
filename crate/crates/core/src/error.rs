use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("spike trains live on different time grids: {0}")]
    GridMismatch(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("correlation undefined: {which} has zero variance")]
    ZeroVariance { which: &'static str },

    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },

    #[error("cannot convert layer `{layer}`: {reason}")]
    Conversion { layer: String, reason: String },

    #[error("mapping domain violated in layer `{layer}` for units {units:?}")]
    MappingDomain { layer: String, units: Vec<usize> },

    #[error("tensor `{0}` is missing from the weights bundle")]
    MissingTensor(String),

    #[error("tensor `{name}`: {detail}")]
    TensorShape { name: String, detail: String },

    #[error("checksum mismatch: manifest says {expected}, blob hashes to {actual}")]
    Checksum { expected: String, actual: String },

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid numeric values rather than I/O or format problems.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::ZeroVariance { .. }
                | Error::MappingDomain { .. }
                | Error::LabelOutOfRange { .. }
                | Error::Conversion { .. }
        )
    }
}
