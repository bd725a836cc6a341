use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph dimensions {n1}x{n2} with {r} colors")]
    Dimensions { n1: usize, n2: usize, r: usize },

    #[error("vertex pair ({x}, {y}) out of range for a {n1}x{n2} graph")]
    VertexOutOfRange { x: usize, y: usize, n1: usize, n2: usize },

    #[error("color {color} on pair ({x}, {y}) exceeds color count {r}")]
    ColorOutOfRange { x: usize, y: usize, color: usize, r: usize },

    #[error("pair ({x}, {y}) assigned more than once")]
    DuplicatePair { x: usize, y: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("view has {size} vertices on one side; exact search supports at most {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
