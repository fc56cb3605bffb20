use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration of {requested} words exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u64 },

    #[error("adjacency is not irreducible: symbols {unreachable:?} are unreachable from symbol {from}")]
    Reducible { from: usize, unreachable: Vec<usize> },

    #[error("orbit hits a cell boundary at time {time} (point {point:?})")]
    BoundaryHit { time: usize, point: [f64; 2] },

    #[error("dimension {n} is not admissible for this quantization; admissible values up to 64: {admissible:?}")]
    Parity { n: usize, admissible: Vec<usize> },

    #[error("numerical contract violated: {0}")]
    Contract(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
