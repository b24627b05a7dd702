use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SynthError>;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed PNG: {source}")]
    PngDecode {
        path: PathBuf,
        #[source]
        source: png::DecodingError,
    },
    #[error("{path}: PNG encoding failed: {source}")]
    PngEncode {
        path: PathBuf,
        #[source]
        source: png::EncodingError,
    },
    #[error("{path}: unsupported bit depth {depth} (expected {expected})")]
    UnsupportedBitDepth {
        path: PathBuf,
        depth: u8,
        expected: u8,
    },
    #[error("{path}: unsupported colour type {found} (expected {expected})")]
    UnsupportedColor {
        path: PathBuf,
        found: String,
        expected: &'static str,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: mor_core::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl SynthError {
    /// Process exit status: 1 for usage errors, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SynthError::Usage(_) => 1,
            SynthError::Core {
                source: mor_core::Error::InvalidParameter { .. },
                ..
            } => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SynthError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        SynthError::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

/// Attaches a context string to core errors.
pub(crate) trait CoreContext<T> {
    fn context(self, what: impl std::fmt::Display) -> Result<T>;
}

impl<T> CoreContext<T> for mor_core::Result<T> {
    fn context(self, what: impl std::fmt::Display) -> Result<T> {
        self.map_err(|source| SynthError::Core {
            context: what.to_string(),
            source,
        })
    }
}
