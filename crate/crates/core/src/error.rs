use confgraph_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown builtin algebra {0:?}")]
    UnknownBuiltin(String),
    #[error("pairing is singular")]
    SingularPairing,
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid algebra: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("io: {0}")]
    Io(String),
    #[error("flavor violation: {0}")]
    FlavorViolation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("not stabilized: {0}")]
    NotStabilized(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
