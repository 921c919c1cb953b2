use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("homomorphism is not well-defined: {0}")]
    IllFormedHom(String),
    #[error("homomorphism is not injective: {0}")]
    NotInjective(String),
    #[error("invalid graph of groups: {0}")]
    InvalidGraph(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a tree of groups: {0}")]
    NotATree(String),
    #[error("inclusion witness rejected: {0}")]
    Witness(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
