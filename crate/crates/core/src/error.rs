use thiserror::Error;

use crate::tree::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("node {0} is not a data node")]
    NotDataNode(NodeId),

    #[error("unknown node id {0}")]
    UnknownNode(NodeId),

    #[error("corrupted tree state: {0}")]
    Corrupted(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid leaf set: {0}")]
    InvalidLeaves(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unsupported audio format: {field} = {value}")]
    UnsupportedFormat { field: &'static str, value: String },

    #[error("malformed audio: {0}")]
    AudioParse(String),

    #[error("frame has {got} samples, window needs {needed}")]
    FrameTooShort { needed: usize, got: usize },

    #[error("evaluation needs both classes, no {0} samples present")]
    MissingClass(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short tag for machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotDataNode(_) => "not_data_node",
            Error::UnknownNode(_) => "unknown_node",
            Error::Corrupted(_) => "corrupted_state",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidLeaves(_) => "invalid_leaves",
            Error::Empty(_) => "empty_input",
            Error::UnsupportedFormat { .. } => "unsupported_format",
            Error::AudioParse(_) => "audio_parse",
            Error::FrameTooShort { .. } => "frame_too_short",
            Error::MissingClass(_) => "missing_class",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
