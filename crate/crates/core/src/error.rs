use thiserror::Error;

/// Errors raised by constructions and operations in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown color `{0}`")]
    UnknownColor(String),
    #[error("unknown species node `{0}`")]
    UnknownOp(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("edge `{edge}` references unknown node `{node}`")]
    DanglingEdge { edge: String, node: String },
    #[error("cannot compose: path ends at `{left}` but next path starts at `{right}`")]
    EndpointMismatch { left: String, right: String },
    #[error("path is not over this graph: {0}")]
    ForeignPath(String),
    #[error("homomorphism is not structure preserving: {0}")]
    InvalidHom(String),
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("color mismatch: expected `{expected}`, found `{found}`")]
    ColorMismatch { expected: String, found: String },
    #[error("gap type mismatch: expected ({expected}), found ({found})")]
    GapMismatch { expected: String, found: String },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("tree is not closed")]
    OpenTree,
    #[error("invalid grammar:\n{0}")]
    InvalidGrammar(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
