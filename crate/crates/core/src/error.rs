use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Source line attached to errors raised while reading a text input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line(pub Option<usize>);

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(n) => write!(f, " at line {n}"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate pair ({u}, {v}){line}")]
    DuplicatePair { u: String, v: String, line: Line },

    #[error("self match on vertex {id}{line}")]
    SelfMatch { id: String, line: Line },

    #[error("empty input")]
    EmptyInput,

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("unknown query id {0}")]
    UnknownQueryId(String),

    #[error("no direct matches above the inlier threshold")]
    NoDirectMatches,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ground truth has no relevant ids")]
    EmptyTruth,

    #[error("no ground truth for query {0}")]
    MissingTruth(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed graph file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable, machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DuplicatePair { .. } => "DuplicatePair",
            Error::SelfMatch { .. } => "SelfMatch",
            Error::EmptyInput => "EmptyInput",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::UnknownQueryId(_) => "UnknownQueryId",
            Error::NoDirectMatches => "NoDirectMatches",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptyTruth => "EmptyTruth",
            Error::MissingTruth(_) => "MissingTruth",
            Error::BadParams(_) => "BadParams",
            Error::Parse { .. } => "ParseError",
            Error::Format(_) => "FormatError",
            Error::Io(_) => "IoError",
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn bad_params(msg: impl Into<String>) -> Self {
        Error::BadParams(msg.into())
    }
}
