use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pipeline stage an estimation failure originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Load,
    Angle,
    Length,
    Deconvolve,
    Save,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Load => "load",
            Stage::Angle => "angle",
            Stage::Length => "length",
            Stage::Deconvolve => "deconvolve",
            Stage::Save => "save",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("failed to decode {}: {reason}", .path.display())]
    Decode { path: PathBuf, reason: String },

    #[error("failed to encode {}: {reason}", .path.display())]
    Encode { path: PathBuf, reason: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("psf ({psf_width}x{psf_height}) does not fit inside {width}x{height}")]
    PsfTooLarge {
        psf_width: usize,
        psf_height: usize,
        width: usize,
        height: usize,
    },

    #[error("unsupported character {0:?}")]
    UnsupportedCharacter(char),

    #[error("no blur structure detected")]
    NoBlurStructure,

    #[error("no length structure detected")]
    NoLengthStructure,

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Stage tag if the error came out of the estimation pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// The innermost error with any stage wrapping removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures of the estimator itself, as opposed to I/O or bad input.
    pub fn is_estimation_failure(&self) -> bool {
        matches!(self.root(), Error::NoBlurStructure | Error::NoLengthStructure)
    }

    pub fn is_io_failure(&self) -> bool {
        matches!(
            self.root(),
            Error::FileNotFound(_)
                | Error::UnsupportedFormat(_)
                | Error::Decode { .. }
                | Error::Encode { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
        )
    }
}
