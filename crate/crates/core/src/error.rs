use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("mediant of {0} and {1} is 0/0")]
    UndefinedMediant(String, String),

    #[error("{0} is outside [0, 1)")]
    OutOfRange(String),

    #[error("tree {0} is not thin")]
    NotThin(String),

    #[error("sequence is not thin: {0}")]
    NotThinSequence(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("diagram {0} is not reduced")]
    NotReduced(String),

    #[error("not a standard dyadic partition: {0}")]
    NonStandardPartition(String),

    #[error("Farey refinement exceeded depth {0}")]
    RefinementDepth(usize),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("{0} = {1} exceeds the bound {2}")]
    ExceedsBound(&'static str, usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}
